#include "stablab/io.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "stablab/errors.hpp"

namespace stablab::io {

namespace {

template <typename T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw ConfigError("field file truncated");
    return v;
}

} // namespace

void write_field(const std::string& path, const GridField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    const auto& g = f.grid();
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(g.points_per_axis()));
    put<double>(os, g.box_length());
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.components()));
    for (int c = 0; c < f.components(); ++c)
        for (const auto& z : f.comp(c)) put<double>(os, z.real());
}

GridField read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + path);
    const auto dim = get<std::uint32_t>(is);
    const auto n = get<std::uint64_t>(is);
    const auto ell = get<double>(is);
    const auto comps = get<std::uint32_t>(is);
    PeriodicGrid grid(static_cast<int>(dim), static_cast<std::size_t>(n), ell);
    GridField f(grid, static_cast<int>(comps));
    for (std::uint32_t c = 0; c < comps; ++c)
        for (auto& z : f.comp(static_cast<int>(c))) z = Complex(get<double>(is), 0.0);
    return f;
}

void write_field_csv(const std::string& path, const GridField& f) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << std::setprecision(17);
    const auto& g = f.grid();
    if (g.dim() == 1) {
        os << "x,value\n";
        for (std::size_t i = 0; i < g.size(); ++i)
            os << g.point(i)[0] << "," << f.comp(0)[i].real() << "\n";
        return;
    }
    os << "x,y,value\n";
    const std::size_t n = g.points_per_axis();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.dim() == 3 && g.axis_index(i, 2) != 0) continue;
        const Point p = g.point(i);
        os << p[0] << "," << p[1] << "," << f.comp(0)[i].real() << "\n";
    }
    (void)n;
}

void write_trajectory(const std::string& path, const PathRecord& rec, int dim) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    put<std::uint32_t>(os, static_cast<std::uint32_t>(dim));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(rec.times.size()));
    for (std::size_t j = 0; j < rec.times.size(); ++j) {
        put<double>(os, rec.times[j]);
        for (int c = 0; c < dim; ++c) put<double>(os, rec.states[j][c]);
    }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i)
        os << header[i] << (i + 1 < header.size() ? "," : "");
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? "," : "");
        os << "\n";
    }
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << content;
}

std::string read_text(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_transform(const std::string& prefix, const ZvonkinTransform& tr) {
    nlohmann::json meta = {
        {"law", tr.law().to_text()},
        {"horizon", tr.horizon()},
        {"n_steps", tr.v().timegrid().n_steps()},
        {"lambda_used", tr.lambda_used()},
        {"grad_sup", tr.grad_sup()},
        {"v_sup", tr.v_sup()},
        {"r_max", tr.r_max()},
        {"interpolation", tr.interpolation() == Interp::multilinear ? "multilinear" : "spectral"},
        {"frames", tr.v().n_frames()},
    };
    write_text(prefix + ".json", meta.dump(2) + "\n");
    for (std::size_t j = 0; j < tr.v().n_frames(); ++j)
        write_field(prefix + "_frame" + std::to_string(j) + ".f64", tr.v().frame(j));
}

} // namespace stablab::io
