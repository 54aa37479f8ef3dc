#include "probin/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "probin/errors.hpp"

namespace probin {

namespace {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    /// Next non-empty, non-comment line split into tokens.
    std::vector<std::string> next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            const auto start = line.find_first_not_of(" \t\r");
            if (start == std::string::npos || line[start] == '#') continue;
            std::istringstream ss(line);
            std::vector<std::string> tokens;
            for (std::string t; ss >> t;) tokens.push_back(t);
            return tokens;
        }
        fail("unexpected end of file");
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorCode::InvalidMesh, "mesh line " + std::to_string(line_no_) + ": " + msg);
    }

    int line() const { return line_no_; }

private:
    std::istream& in_;
    int line_no_ = 0;
};

double to_double(const LineReader& r, const std::string& s) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) r.fail("bad number '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        r.fail("bad number '" + s + "'");
    }
}

long to_index(const LineReader& r, const std::string& s) {
    try {
        size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size() || v < 0) r.fail("bad index '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        r.fail("bad index '" + s + "'");
    }
}

size_t expect_block(LineReader& r, const std::string& name) {
    const auto t = r.next();
    if (t.size() != 2 || t[0] != name) r.fail("expected '" + name + " <count>'");
    return static_cast<size_t>(to_index(r, t[1]));
}

BoundaryLabel parse_label(const LineReader& r, const std::string& s) {
    if (s == "DIRICHLET") return BoundaryLabel::Dirichlet;
    if (s == "ROBIN") return BoundaryLabel::Robin;
    if (s == "OUTER") return BoundaryLabel::Outer;
    r.fail("unknown boundary label '" + s + "'");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

DiscreteDomain read_mesh(std::istream& in) {
    LineReader r(in);
    const auto header = r.next();
    if (header.size() != 3 || header[0] != "mesh") r.fail("expected 'mesh <mode> <dim>'");
    DimMode mode;
    if (header[1] == "interval") {
        mode = DimMode::Interval;
    } else if (header[1] == "radial") {
        mode = DimMode::Radial;
    } else if (header[1] == "planar") {
        mode = DimMode::Planar;
    } else {
        r.fail("unknown mesh mode '" + header[1] + "'");
    }
    const int dim = static_cast<int>(to_index(r, header[2]));
    const size_t coords = mode == DimMode::Planar ? 2 : 1;
    const size_t per_element = mode == DimMode::Planar ? 3 : 2;

    const size_t n_nodes = expect_block(r, "nodes");
    std::vector<Point> nodes(n_nodes, Point::Zero());
    for (auto& x : nodes) {
        const auto t = r.next();
        if (t.size() != coords) r.fail("node needs " + std::to_string(coords) + " coordinate(s)");
        for (size_t k = 0; k < coords; ++k) x[static_cast<Eigen::Index>(k)] = to_double(r, t[k]);
    }

    const size_t n_elements = expect_block(r, "elements");
    std::vector<std::array<int, 3>> elements(n_elements, {-1, -1, -1});
    std::vector<Region> regions(n_elements, Region::Substrate);
    for (size_t e = 0; e < n_elements; ++e) {
        auto t = r.next();
        if (t.size() == per_element + 1 && t.back() == "COATING") {
            regions[e] = Region::Coating;
            t.pop_back();
        }
        if (t.size() != per_element) r.fail("element needs " + std::to_string(per_element) + " node indices");
        for (size_t k = 0; k < per_element; ++k) elements[e][k] = static_cast<int>(to_index(r, t[k]));
    }

    const size_t n_faces = expect_block(r, "boundary");
    std::vector<FaceSpec> faces(n_faces);
    const size_t per_face = per_element - 1;
    for (auto& f : faces) {
        const auto t = r.next();
        if (t.size() != per_face + 1) r.fail("boundary face needs " + std::to_string(per_face) + " node index(es) and a label");
        f.n_nodes = static_cast<int>(per_face);
        for (size_t k = 0; k < per_face; ++k) f.nodes[k] = static_cast<int>(to_index(r, t[k]));
        f.label = parse_label(r, t.back());
    }
    return DiscreteDomain(mode, dim, std::move(nodes), std::move(elements), std::move(regions), faces);
}

DiscreteDomain read_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open mesh file " + path);
    return read_mesh(in);
}

void write_mesh(std::ostream& out, const DiscreteDomain& domain) {
    const bool planar = domain.mode() == DimMode::Planar;
    out << "mesh " << to_string(domain.mode()) << ' ' << domain.space_dim() << '\n';
    out << "nodes " << domain.num_nodes() << '\n';
    for (const auto& x : domain.nodes()) {
        out << fmt(x.x());
        if (planar) out << ' ' << fmt(x.y());
        out << '\n';
    }
    out << "elements " << domain.num_elements() << '\n';
    for (size_t e = 0; e < domain.num_elements(); ++e) {
        const auto nodes = domain.element_nodes(e);
        for (size_t a = 0; a < nodes.size(); ++a) out << (a ? " " : "") << nodes[a];
        if (domain.region(e) == Region::Coating) out << " COATING";
        out << '\n';
    }
    out << "boundary " << domain.boundary_faces().size() << '\n';
    for (const auto& f : domain.boundary_faces()) {
        for (int v : f.node_span()) out << v << ' ';
        out << to_string(f.label) << '\n';
    }
}

void write_mesh_file(const std::string& path, const DiscreteDomain& domain) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write mesh file " + path);
    write_mesh(out, domain);
    if (!out) throw Error(ErrorCode::IoError, "failed writing mesh file " + path);
}

}  // namespace probin
