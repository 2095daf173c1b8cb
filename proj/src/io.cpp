#include "rcext/io.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

namespace rcext {

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw FileFormatError("cannot open for writing: " + path);
    os.precision(17);
    return os;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
    std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
    if (!is) throw FileFormatError("cannot open for reading: " + path);
    return is;
}

void write_le_i64(std::ostream& os, std::int64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::int64_t read_le_i64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw FileFormatError("unexpected end of binary file");
    std::int64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

void write_le_f64(std::ostream& os, double v) {
    std::int64_t bits;
    std::memcpy(&bits, &v, 8);
    write_le_i64(os, bits);
}

double read_le_f64(std::istream& is) {
    const std::int64_t bits = read_le_i64(is);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

// ---- coefficient sequences --------------------------------------------------

void write_sequence(std::ostream& os, const HermitianSeq& seq) {
    const IndexSet& set = seq.index_set();
    if (!set.is_box())
        throw FileFormatError("write_sequence: only box index sets have a file form");
    os << set.dim();
    for (int a = 0; a < set.dim(); ++a) os << ' ' << set.box_radii()[a];
    os << '\n';
    os << std::setprecision(17);
    for (int i = 0; i < set.size(); ++i) {
        for (int a = 0; a < set.dim(); ++a) os << set.exponent(i)[a] << ' ';
        os << seq[i].real() << ' ' << seq[i].imag() << '\n';
    }
}

void write_sequence_file(const std::string& path, const HermitianSeq& seq) {
    auto os = open_out(path);
    write_sequence(os, seq);
}

HermitianSeq read_sequence(std::istream& is) {
    int d = 0;
    if (!(is >> d) || d < 1) throw FileFormatError("sequence: bad dimension header");
    std::vector<int> radii(d);
    for (int a = 0; a < d; ++a)
        if (!(is >> radii[a]) || radii[a] < 0)
            throw FileFormatError("sequence: bad radius in header");
    const IndexSet set = IndexSet::box(radii);
    Eigen::VectorXcd v(set.size());
    std::vector<bool> seen(set.size(), false);
    for (int i = 0; i < set.size(); ++i) {
        std::vector<int> k(d);
        for (int a = 0; a < d; ++a)
            if (!(is >> k[a])) throw FileFormatError("sequence: truncated exponent line");
        double re, im;
        if (!(is >> re >> im)) throw FileFormatError("sequence: truncated value line");
        const int pos = set.find(k);
        if (pos < 0) throw FileFormatError("sequence: exponent outside the declared box");
        if (seen[pos]) throw FileFormatError("sequence: duplicate exponent line");
        seen[pos] = true;
        v[pos] = {re, im};
    }
    try {
        return {set, std::move(v)};
    } catch (const std::invalid_argument& e) {
        throw FileFormatError(std::string("sequence: ") + e.what());
    }
}

HermitianSeq read_sequence_file(const std::string& path) {
    auto is = open_in(path);
    return read_sequence(is);
}

// ---- grid fields -------------------------------------------------------------

void write_field_csv(std::ostream& os, const GridField& field) {
    const GridSpec& g = field.grid();
    for (int a = 0; a < g.dim(); ++a) os << "theta" << a + 1 << ',';
    os << "value\n";
    os << std::setprecision(17);
    for (long j = 0; j < g.node_count(); ++j) {
        const Eigen::VectorXd theta = g.node(j);
        for (int a = 0; a < g.dim(); ++a) os << theta[a] << ',';
        os << field.values()[j] << '\n';
    }
}

void write_field_csv_file(const std::string& path, const GridField& field) {
    auto os = open_out(path);
    write_field_csv(os, field);
}

void write_field_binary_file(const std::string& path, const GridField& field) {
    auto os = open_out(path, true);
    os.write("RCXFLD1\n", 8);
    write_le_i64(os, field.grid().dim());
    write_le_i64(os, field.grid().offset() ? 1 : 0);
    for (int a = 0; a < field.grid().dim(); ++a) write_le_i64(os, field.grid().shape()[a]);
    for (long j = 0; j < field.grid().node_count(); ++j) write_le_f64(os, field.values()[j]);
}

GridField read_field_binary_file(const std::string& path) {
    auto is = open_in(path, true);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, "RCXFLD1\n", 8) != 0)
        throw FileFormatError("field: bad magic");
    const auto d = read_le_i64(is);
    if (d < 1 || d > 16) throw FileFormatError("field: bad dimension");
    const bool offset = read_le_i64(is) != 0;
    std::vector<int> shape(d);
    for (auto& n : shape) n = static_cast<int>(read_le_i64(is));
    GridSpec grid(shape, offset);
    Eigen::VectorXd v(grid.node_count());
    for (long j = 0; j < grid.node_count(); ++j) v[j] = read_le_f64(is);
    return {std::move(grid), std::move(v)};
}

// ---- data records ------------------------------------------------------------

void write_record_text(std::ostream& os, const DataRecord& rec) {
    os << rec.dim();
    for (int a = 0; a < rec.dim(); ++a) os << ' ' << rec.shape()[a];
    os << '\n';
    os << std::setprecision(17);
    for (long j = 0; j < rec.count(); ++j)
        os << rec.values()[j].real() << ' ' << rec.values()[j].imag() << '\n';
}

void write_record_file(const std::string& path, const DataRecord& rec, bool binary) {
    if (binary) {
        auto os = open_out(path, true);
        os.write("RCXTEN1\n", 8);
        write_le_i64(os, rec.dim());
        for (int a = 0; a < rec.dim(); ++a) write_le_i64(os, rec.shape()[a]);
        for (long j = 0; j < rec.count(); ++j) {
            write_le_f64(os, rec.values()[j].real());
            write_le_f64(os, rec.values()[j].imag());
        }
    } else {
        auto os = open_out(path);
        write_record_text(os, rec);
    }
}

DataRecord read_record_file(const std::string& path) {
    {
        auto probe = open_in(path, true);
        char magic[8] = {};
        probe.read(magic, 8);
        if (probe && std::memcmp(magic, "RCXTEN1\n", 8) == 0) {
            const auto d = read_le_i64(probe);
            if (d < 1 || d > 16) throw FileFormatError("record: bad dimension");
            std::vector<int> shape(d);
            long count = 1;
            for (auto& n : shape) {
                n = static_cast<int>(read_le_i64(probe));
                count *= n;
            }
            Eigen::VectorXcd v(count);
            for (long j = 0; j < count; ++j) {
                const double re = read_le_f64(probe);
                const double im = read_le_f64(probe);
                v[j] = {re, im};
            }
            return {std::move(shape), std::move(v)};
        }
    }
    auto is = open_in(path);
    int d = 0;
    if (!(is >> d) || d < 1) throw FileFormatError("record: bad dimension header");
    std::vector<int> shape(d);
    long count = 1;
    for (auto& n : shape) {
        if (!(is >> n) || n < 1) throw FileFormatError("record: bad shape header");
        count *= n;
    }
    Eigen::VectorXcd v(count);
    std::string line;
    std::getline(is, line);  // finish header line
    for (long j = 0; j < count; ++j) {
        if (!std::getline(is, line)) throw FileFormatError("record: truncated data");
        std::istringstream ls(line);
        double re = 0, im = 0;
        if (!(ls >> re)) throw FileFormatError("record: bad value line");
        ls >> im;  // optional imaginary part
        v[j] = {re, im};
    }
    return {std::move(shape), std::move(v)};
}

// ---- weights -------------------------------------------------------------------

void write_weight(std::ostream& os, const WeightMatrix& w, std::optional<double> scalar) {
    os << std::setprecision(17);
    if (scalar) {
        os << "scalar " << *scalar << '\n';
        return;
    }
    const int n = w.size();
    os << "matrix " << n << '\n';
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            os << w.matrix()(i, j).real() << ' ' << w.matrix()(i, j).imag()
               << (j + 1 == n ? '\n' : ' ');
    }
}

WeightMatrix read_weight(std::istream& is, const IndexSet& set) {
    std::string kind;
    if (!(is >> kind)) throw FileFormatError("weight: empty specification");
    if (kind == "scalar") {
        double lambda;
        if (!(is >> lambda) || !(lambda > 0))
            throw FileFormatError("weight: scalar weight needs a positive value");
        return WeightMatrix::scalar(set, lambda);
    }
    if (kind != "matrix") throw FileFormatError("weight: unknown kind '" + kind + "'");
    int n;
    if (!(is >> n) || n != set.size())
        throw FileFormatError("weight: matrix size does not match the index set");
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double re, im;
            if (!(is >> re >> im)) throw FileFormatError("weight: truncated matrix");
            m(i, j) = {re, im};
        }
    try {
        return {set, std::move(m)};
    } catch (const std::invalid_argument& e) {
        throw FileFormatError(std::string("weight: ") + e.what());
    }
}

WeightMatrix read_weight_file(const std::string& path, const IndexSet& set) {
    auto is = open_in(path);
    return read_weight(is, set);
}

// ---- solution files --------------------------------------------------------------

namespace {
const char* mode_name(MatchMode m) {
    switch (m) {
        case MatchMode::exact: return "exact";
        case MatchMode::soft: return "soft";
        default: return "hard";
    }
}

MatchMode mode_from_name(const std::string& s) {
    if (s == "exact") return MatchMode::exact;
    if (s == "soft") return MatchMode::soft;
    if (s == "hard") return MatchMode::hard;
    throw FileFormatError("solution: unknown mode '" + s + "'");
}
}  // namespace

void write_solution_file(const std::string& path, const DualSolution& sol,
                         const WeightMatrix* w, std::optional<double> scalar_weight) {
    auto os = open_out(path);
    os << std::setprecision(17);
    os << "[meta]\n";
    os << "mode " << mode_name(sol.mode) << '\n';
    os << "grid_offset " << (sol.grid.offset() ? 1 : 0) << '\n';
    os << "grid_shape";
    for (int a = 0; a < sol.grid.dim(); ++a) os << ' ' << sol.grid.shape()[a];
    os << '\n';
    os << "gamma " << sol.gamma << '\n';
    os << "trivial " << (sol.diagnostics.trivial_hard_solution ? 1 : 0) << '\n';
    os << "iterations " << sol.diagnostics.iterations << '\n';
    os << "converged " << (sol.diagnostics.converged ? 1 : 0) << '\n';
    if (w) {
        os << "[weight]\n";
        write_weight(os, *w, scalar_weight);
    }
    os << "[q]\n";
    write_sequence(os, sol.q);
    os << "[r]\n";
    write_sequence(os, sol.r);
    os << "[c_hat]\n";
    write_sequence(os, sol.c_hat);
    os << "[atoms]\n";
    os << sol.atoms.size() << '\n';
    for (const Atom& a : sol.atoms) {
        for (int ax = 0; ax < a.theta.size(); ++ax) os << a.theta[ax] << ' ';
        os << a.mass << '\n';
    }
    os << "atom_fit_residual " << sol.atom_fit_residual << '\n';
    os << "[kkt]\n";
    os << "min_q_grid " << sol.kkt.min_q_grid << '\n';
    os << "complementary_slack " << sol.kkt.complementary_slack << '\n';
    os << "moment_residual " << sol.kkt.moment_residual << '\n';
    os << "weight_residual " << sol.kkt.weight_residual << '\n';
    os << "gamma_residual " << sol.kkt.gamma_residual << '\n';
    os << "boundary_residual " << sol.kkt.boundary_residual << '\n';
    os << "grad_norm " << sol.kkt.grad_norm << '\n';
}

SolutionFile read_solution_file(const std::string& path) {
    auto is = open_in(path);
    std::string tok;
    if (!(is >> tok) || tok != "[meta]") throw FileFormatError("solution: missing [meta]");

    auto expect_key = [&](const char* key) {
        if (!(is >> tok) || tok != key)
            throw FileFormatError(std::string("solution: expected key ") + key);
    };
    expect_key("mode");
    std::string mode_s;
    is >> mode_s;
    const MatchMode mode = mode_from_name(mode_s);
    expect_key("grid_offset");
    int off;
    is >> off;
    expect_key("grid_shape");
    // read shape values until the next key (gamma)
    std::vector<int> shape;
    while (is >> tok && tok != "gamma") shape.push_back(std::stoi(tok));
    if (shape.empty()) throw FileFormatError("solution: empty grid shape");
    double gamma;
    is >> gamma;
    expect_key("trivial");
    int trivial;
    is >> trivial;
    expect_key("iterations");
    int iters;
    is >> iters;
    expect_key("converged");
    int conv;
    is >> conv;

    if (!(is >> tok)) throw FileFormatError("solution: truncated after meta");
    std::optional<double> scalar_weight;
    std::optional<Eigen::MatrixXcd> wmat;
    std::string wkind;
    if (tok == "[weight]") {
        is >> wkind;
        if (wkind == "scalar") {
            double lambda;
            is >> lambda;
            scalar_weight = lambda;
        } else if (wkind == "matrix") {
            int n;
            is >> n;
            Eigen::MatrixXcd m(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double re, im;
                    if (!(is >> re >> im)) throw FileFormatError("solution: truncated weight");
                    m(i, j) = {re, im};
                }
            wmat = std::move(m);
        } else {
            throw FileFormatError("solution: bad weight kind");
        }
        is >> tok;
    }
    if (tok != "[q]") throw FileFormatError("solution: missing [q]");
    HermitianSeq q = read_sequence(is);
    if (!(is >> tok) || tok != "[r]") throw FileFormatError("solution: missing [r]");
    HermitianSeq r = read_sequence(is);
    if (!(is >> tok) || tok != "[c_hat]") throw FileFormatError("solution: missing [c_hat]");
    HermitianSeq c_hat = read_sequence(is);

    DualSolution sol(mode, std::move(q), std::move(r), std::move(c_hat),
                     GridSpec(shape, off != 0));
    sol.gamma = gamma;
    sol.diagnostics.trivial_hard_solution = trivial != 0;
    sol.diagnostics.iterations = iters;
    sol.diagnostics.converged = conv != 0;

    if (!(is >> tok) || tok != "[atoms]") throw FileFormatError("solution: missing [atoms]");
    size_t n_atoms;
    is >> n_atoms;
    const int d = sol.q.index_set().dim();
    for (size_t i = 0; i < n_atoms; ++i) {
        Atom a;
        a.theta.resize(d);
        for (int ax = 0; ax < d; ++ax)
            if (!(is >> a.theta[ax])) throw FileFormatError("solution: truncated atom");
        if (!(is >> a.mass)) throw FileFormatError("solution: truncated atom mass");
        sol.atoms.push_back(std::move(a));
    }
    expect_key("atom_fit_residual");
    is >> sol.atom_fit_residual;

    if (!(is >> tok) || tok != "[kkt]") throw FileFormatError("solution: missing [kkt]");
    expect_key("min_q_grid");
    is >> sol.kkt.min_q_grid;
    expect_key("complementary_slack");
    is >> sol.kkt.complementary_slack;
    expect_key("moment_residual");
    is >> sol.kkt.moment_residual;
    expect_key("weight_residual");
    is >> sol.kkt.weight_residual;
    expect_key("gamma_residual");
    is >> sol.kkt.gamma_residual;
    expect_key("boundary_residual");
    is >> sol.kkt.boundary_residual;
    expect_key("grad_norm");
    is >> sol.kkt.grad_norm;
    if (!is) throw FileFormatError("solution: truncated kkt section");

    SolutionFile out{std::move(sol), std::nullopt, scalar_weight};
    if (scalar_weight)
        out.weight = WeightMatrix::scalar(out.solution.q.index_set(), *scalar_weight);
    else if (wmat)
        out.weight = WeightMatrix(out.solution.q.index_set(), std::move(*wmat));
    return out;
}

// ---- wiener model -------------------------------------------------------------

void write_model_file(const std::string& path, const WienerModel& model) {
    auto os = open_out(path);
    os << std::setprecision(17);
    os << "[wiener]\n";
    os << "tau " << model.tau << '\n';
    os << "clamped_lags " << model.clamped_lags << '\n';
    os << "[p]\n";
    write_sequence(os, model.p);
    os << "[q]\n";
    write_sequence(os, model.q);
    os << "[filter]\n";
    os << model.filter.shape.size();
    for (int n : model.filter.shape) os << ' ' << n;
    os << '\n';
    os << "reconstruction_error " << model.filter.reconstruction_error << '\n';
    for (long j = 0; j < model.filter.coeffs.size(); ++j) os << model.filter.coeffs[j] << '\n';
}

WienerModel read_model_file(const std::string& path) {
    auto is = open_in(path);
    std::string tok;
    if (!(is >> tok) || tok != "[wiener]") throw FileFormatError("model: missing [wiener]");
    if (!(is >> tok) || tok != "tau") throw FileFormatError("model: missing tau");
    double tau;
    is >> tau;
    if (!(is >> tok) || tok != "clamped_lags") throw FileFormatError("model: missing clamped_lags");
    int clamped;
    is >> clamped;
    if (!(is >> tok) || tok != "[p]") throw FileFormatError("model: missing [p]");
    HermitianSeq p = read_sequence(is);
    if (!(is >> tok) || tok != "[q]") throw FileFormatError("model: missing [q]");
    HermitianSeq q = read_sequence(is);
    if (!(is >> tok) || tok != "[filter]") throw FileFormatError("model: missing [filter]");
    int d;
    is >> d;
    if (!is || d < 1 || d > 16) throw FileFormatError("model: bad filter dimension");
    FilterCoefficients f;
    f.shape.resize(d);
    long count = 1;
    for (auto& n : f.shape) {
        if (!(is >> n) || n < 1) throw FileFormatError("model: bad filter shape");
        count *= n;
    }
    if (!(is >> tok) || tok != "reconstruction_error")
        throw FileFormatError("model: missing reconstruction_error");
    is >> f.reconstruction_error;
    f.coeffs.resize(count);
    for (long j = 0; j < count; ++j)
        if (!(is >> f.coeffs[j])) throw FileFormatError("model: truncated filter");
    WienerModel model(tau, std::move(p), std::move(q), std::move(f));
    model.clamped_lags = clamped;
    return model;
}

// ---- images ---------------------------------------------------------------------

namespace {
// skips PNM whitespace and comments
int pnm_next_int(std::istream& is) {
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            while ((c = is.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            is.unget();
            break;
        }
    }
    int v;
    if (!(is >> v)) throw FileFormatError("image: bad PNM header");
    return v;
}
}  // namespace

DataRecord read_image_file(const std::string& path) {
    auto is = open_in(path, true);
    char m0 = 0, m1 = 0;
    is.get(m0);
    is.get(m1);
    if (m0 != 'P' || (m1 != '4' && m1 != '5'))
        throw FileFormatError("image: only P4 (pbm) and P5 (pgm) are supported");
    const int width = pnm_next_int(is);
    const int height = pnm_next_int(is);
    int maxval = 1;
    if (m1 == '5') {
        maxval = pnm_next_int(is);
        if (maxval < 1 || maxval > 255)
            throw FileFormatError("image: only 8-bit graymaps are supported");
    }
    is.get();  // single whitespace before raster
    Eigen::VectorXcd v(static_cast<long>(width) * height);
    if (m1 == '5') {
        std::vector<unsigned char> row(width);
        for (int y = 0; y < height; ++y) {
            is.read(reinterpret_cast<char*>(row.data()), width);
            if (!is) throw FileFormatError("image: truncated raster");
            for (int x = 0; x < width; ++x)
                v[static_cast<long>(y) * width + x] = static_cast<double>(row[x]);
        }
    } else {
        const int stride = (width + 7) / 8;
        std::vector<unsigned char> row(stride);
        for (int y = 0; y < height; ++y) {
            is.read(reinterpret_cast<char*>(row.data()), stride);
            if (!is) throw FileFormatError("image: truncated raster");
            for (int x = 0; x < width; ++x) {
                const bool bit = (row[x / 8] >> (7 - x % 8)) & 1;
                // PBM convention: 1 is black; store 1 for set bits as-is
                v[static_cast<long>(y) * width + x] = bit ? 1.0 : 0.0;
            }
        }
    }
    return {{height, width}, std::move(v)};
}

void write_image_p4_file(const std::string& path, const DataRecord& binary) {
    if (binary.dim() != 2) throw FileFormatError("image: P4 writer needs a 2-D record");
    const int height = binary.shape()[0], width = binary.shape()[1];
    auto os = open_out(path, true);
    os << "P4\n" << width << ' ' << height << '\n';
    const int stride = (width + 7) / 8;
    std::vector<unsigned char> row(stride);
    for (int y = 0; y < height; ++y) {
        std::fill(row.begin(), row.end(), 0);
        for (int x = 0; x < width; ++x) {
            const double val = binary.values()[static_cast<long>(y) * width + x].real();
            if (val > 0.5) row[x / 8] |= static_cast<unsigned char>(1 << (7 - x % 8));
        }
        os.write(reinterpret_cast<const char*>(row.data()), stride);
    }
}

void write_image_p5_file(const std::string& path, const DataRecord& values) {
    if (values.dim() != 2) throw FileFormatError("image: P5 writer needs a 2-D record");
    const int height = values.shape()[0], width = values.shape()[1];
    auto os = open_out(path, true);
    os << "P5\n" << width << ' ' << height << "\n255\n";
    std::vector<unsigned char> row(width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double val = values.values()[static_cast<long>(y) * width + x].real();
            val = std::min(std::max(val, 0.0), 1.0);
            row[x] = static_cast<unsigned char>(val * 255.0 + 0.5);
        }
        os.write(reinterpret_cast<const char*>(row.data()), width);
    }
}

DataRecord binarize_midpoint(const DataRecord& gray) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (long j = 0; j < gray.count(); ++j) {
        const double v = gray.values()[j].real();
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double mid = 0.5 * (lo + hi);
    Eigen::VectorXcd out(gray.count());
    for (long j = 0; j < gray.count(); ++j)
        out[j] = gray.values()[j].real() > mid ? 1.0 : 0.0;
    return {gray.shape(), std::move(out)};
}

}  // namespace rcext
