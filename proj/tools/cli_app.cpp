#include "cli_app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include "rcext/analysis.hpp"
#include "rcext/estimate.hpp"
#include "rcext/io.hpp"
#include "rcext/simulate.hpp"
#include "rcext/solve.hpp"
#include "rcext/trig.hpp"
#include "rcext/wiener.hpp"

namespace rcext_cli {

namespace {

using json = nlohmann::json;
using namespace rcext;

std::vector<int> parse_int_list(const std::string& s, const char* what) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (...) {
            throw CLI::ValidationError(std::string(what) + ": expected comma-separated integers");
        }
    }
    if (out.empty()) throw CLI::ValidationError(std::string(what) + ": empty list");
    return out;
}

// weight spec "scalar:0.5" or "file:path"
WeightMatrix parse_weight(const std::string& spec, const IndexSet& set) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--weight: expected scalar:<lambda> or file:<path>");
    const std::string kind = spec.substr(0, colon), rest = spec.substr(colon + 1);
    if (kind == "scalar") {
        const double lambda = std::stod(rest);
        return WeightMatrix::scalar(set, lambda);
    }
    if (kind == "file") return read_weight_file(rest, set);
    throw CLI::ValidationError("--weight: unknown kind '" + kind + "'");
}

GridSpec make_grid(int dim, int n, bool offset) {
    if (n <= 0) {
        const SolverConfig def = SolverConfig::for_dim(dim);
        return GridSpec(def.grid.shape(), offset);
    }
    return GridSpec::uniform(dim, n, offset);
}

void echo_config(const CLI::App& app) {
    std::cerr << "# resolved configuration\n";
    for (const std::string& line : {app.config_to_str(true, false)})
        for (size_t pos = 0, next; pos < line.size(); pos = next + 1) {
            next = line.find('\n', pos);
            if (next == std::string::npos) next = line.size();
            if (next > pos) std::cerr << "#   " << line.substr(pos, next - pos) << '\n';
        }
}

// absolutely continuous spectrum samples P/Q with Q floored near its zeros
GridField spectrum_field(const DualSolution& sol, const HermitianSeq& p, const GridSpec& grid) {
    const GridField pf = synthesize(p, grid);
    const GridField qf = synthesize(sol.q, grid);
    const double floor = 1e-13 * std::max(qf.values().cwiseAbs().maxCoeff(), 1e-300);
    return {grid, (pf.values().array() / qf.values().array().max(floor)).matrix()};
}

void print_kkt(std::ostream& os, const DualSolution& sol) {
    os << "iterations " << sol.diagnostics.iterations << "\n"
       << "grad_norm " << sol.diagnostics.grad_norm << "\n"
       << "min_q_grid " << sol.kkt.min_q_grid << "\n"
       << "complementary_slack " << sol.kkt.complementary_slack << "\n"
       << "moment_residual " << sol.kkt.moment_residual << "\n"
       << "weight_residual " << sol.kkt.weight_residual << "\n";
    if (sol.mode == MatchMode::hard)
        os << "gamma " << sol.gamma << "\n"
           << "gamma_residual " << sol.kkt.gamma_residual << "\n"
           << "boundary_residual " << sol.kkt.boundary_residual << "\n";
    if (!sol.atoms.empty()) {
        os << "atoms " << sol.atoms.size() << "\n";
        for (const Atom& a : sol.atoms) {
            os << "  atom theta";
            for (int i = 0; i < a.theta.size(); ++i) os << ' ' << a.theta[i];
            os << " mass " << a.mass << "\n";
        }
        os << "atom_fit_residual " << sol.atom_fit_residual << "\n";
    }
}

// ---- subcommand bodies ----

int cmd_estimate(const std::string& data_path, const std::string& box_spec,
                 const std::string& mode, const std::string& out_path) {
    const DataRecord data = read_record_file(data_path);
    const std::vector<int> radii = parse_int_list(box_spec, "--lambda-box");
    if (static_cast<int>(radii.size()) != data.dim())
        throw std::invalid_argument("estimate: --lambda-box dimension does not match the data");
    const IndexSet set = IndexSet::box(radii);
    const HermitianSeq c = mode == "unbiased" ? unbiased_cov(data, set) : biased_cov(data, set);
    write_sequence_file(out_path, c);
    std::cout << "wrote " << out_path << " (" << mode << ", |Lambda| = " << set.size() << ")\n";
    return kOk;
}

int cmd_solve(const std::string& cov_path, const std::string& prior_spec,
              const std::string& mode, const std::string& weight_spec, int grid_n, bool offset,
              const std::string& out_path, const std::string& spectrum_path) {
    const HermitianSeq c = read_sequence_file(cov_path);
    const IndexSet& set = c.index_set();
    const HermitianSeq p =
        prior_spec == "me" ? HermitianSeq::unit(set) : read_sequence_file(prior_spec);
    if (p.index_set() != set)
        throw std::invalid_argument("solve: prior and covariance index sets differ");

    SolverConfig cfg(make_grid(set.dim(), grid_n, offset));
    std::optional<WeightMatrix> w;
    std::optional<double> scalar_weight;
    if (mode != "exact") {
        if (weight_spec.empty())
            throw std::invalid_argument("solve: soft/hard mode requires --weight");
        w = parse_weight(weight_spec, set);
        if (weight_spec.rfind("scalar:", 0) == 0)
            scalar_weight = std::stod(weight_spec.substr(7));
    }

    DualSolution sol = [&] {
        if (mode == "exact") return solve_exact(c, p, cfg);
        if (mode == "soft") return solve_soft(c, p, *w, cfg);
        return solve_hard(c, p, *w, cfg);
    }();

    write_solution_file(out_path, sol, w ? &*w : nullptr, scalar_weight);
    if (!spectrum_path.empty())
        write_field_csv_file(spectrum_path, spectrum_field(sol, p, cfg.grid));
    std::cout << "mode " << mode << "\n";
    print_kkt(std::cout, sol);
    std::cout << "wrote " << out_path << "\n";
    return kOk;
}

int cmd_convert_weight(const std::string& solution_path, const std::string& direction,
                       const std::string& out_path) {
    const SolutionFile sf = read_solution_file(solution_path);
    if (!sf.weight)
        throw std::invalid_argument("convert-weight: solution file carries no weight section");
    const WeightMatrix converted = direction == "soft2hard"
                                       ? hard_weight_from_soft(*sf.weight, sf.solution.q)
                                       : soft_weight_from_hard(*sf.weight, sf.solution.q);
    std::ofstream os(out_path);
    if (!os) throw FileFormatError("cannot open for writing: " + out_path);
    os.precision(17);
    // scalar weights stay scalar under both maps
    if (sf.scalar_weight) {
        const double lambda = converted.matrix()(0, 0).real();
        write_weight(os, converted, lambda);
    } else {
        write_weight(os, converted, std::nullopt);
    }
    std::cout << "wrote " << out_path << " (" << direction << ")\n";
    return kOk;
}

int cmd_analyze(const std::string& cov_path, const std::string& prior_spec,
                const std::string& weight_spec, std::uint64_t seed) {
    const HermitianSeq c = read_sequence_file(cov_path);
    const IndexSet& set = c.index_set();
    const HermitianSeq p =
        prior_spec == "me" ? HermitianSeq::unit(set) : read_sequence_file(prior_spec);
    if (p.index_set() != set)
        throw std::invalid_argument("analyze: prior and covariance index sets differ");
    const WeightMatrix w = parse_weight(weight_spec, set);

    const SingularFreeBound bound = singular_free_bound(c, p, w);
    std::cout << "singular_free_guaranteed " << (bound.guaranteed_absolutely_continuous ? 1 : 0)
              << "\n";
    std::cout << "singular_free_margin " << bound.margin << "\n";
    std::cout << "induced_norm_21 " << bound.induced_norm_21 << "\n";
    std::cout << "hard_existence_sufficient " << (sufficient_hard_existence(c, w) ? 1 : 0)
              << "\n";

    if (set.dim() == 1 && set.is_box()) {
        const ConeLocation loc = cone_test_toeplitz_1d(c);
        std::cout << "cone_toeplitz "
                  << (loc == ConeLocation::interior
                          ? "interior"
                          : loc == ConeLocation::boundary ? "boundary" : "outside")
                  << "\n";
    } else {
        // surrogate: probe with random strictly positive polynomials
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double min_pairing = std::numeric_limits<double>::infinity();
        const GridSpec probe_grid(SolverConfig::for_dim(set.dim()).grid);
        for (int rep = 0; rep < 200; ++rep) {
            Eigen::VectorXd uu(set.size());
            for (int i = 0; i < set.size(); ++i) uu[i] = u(rng);
            HermitianSeq g = HermitianSeq::from_real(set, uu);
            // square it on the grid to get a nonnegative polynomial
            const GridField gf = synthesize(g, probe_grid);
            const HermitianSeq sq =
                moments(GridField(probe_grid, gf.values().cwiseProduct(gf.values())), set);
            min_pairing = std::min(min_pairing, inner_product(c, sq) / sq.norm2());
        }
        std::cout << "cone_probe_min_pairing " << min_pairing << "\n";
    }
    return kOk;
}

int cmd_simulate(int steps, int window, std::uint64_t seed, int replicates, int grid_n,
                 const std::string& out_dir, const std::string& summary_path) {
    const Arma2D sys = default_system();
    const IndexSet set = IndexSet::box({2, 2});
    const HermitianSeq c_true =
        true_covariances(sys, set, GridSpec::uniform(2, 512, true));
    const HermitianSeq prior = HermitianSeq::unit(set);
    SolverConfig cfg(make_grid(2, grid_n, true));

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!summary_path.empty()) {
        file.open(summary_path);
        if (!file) throw FileFormatError("cannot open for writing: " + summary_path);
        os = &file;
    }

    double sum_exact = 0, sum_soft_b = 0, sum_soft_u = 0;
    for (int r = 0; r < replicates; ++r) {
        const std::uint64_t rep_seed = seed + static_cast<std::uint64_t>(r);
        const DataRecord field = simulate_field(sys, steps, rep_seed);
        const DataRecord data = trailing_window(field, window);
        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            write_record_file(out_dir + "/record_" + std::to_string(r) + ".txt", data);
        }
        const HermitianSeq cb = biased_cov(data, set);
        const HermitianSeq cu = unbiased_cov(data, set);
        const double lam_b = std::pow((cb - c_true).norm2(), 2);
        const double lam_u = std::pow((cu - c_true).norm2(), 2);

        const DualSolution exact = solve_exact(cb, prior, cfg);
        const DualSolution soft_b =
            solve_soft(cb, prior, WeightMatrix::scalar(set, lam_b), cfg);
        const DualSolution soft_u =
            solve_soft(cu, prior, WeightMatrix::scalar(set, lam_u), cfg);

        const double err_exact = (exact.r - c_true).norm2();
        const double err_soft_b = (soft_b.r - c_true).norm2();
        const double err_soft_u = (soft_u.r - c_true).norm2();
        sum_exact += err_exact;
        sum_soft_b += err_soft_b;
        sum_soft_u += err_soft_u;

        json line = {{"replicate", r},
                     {"seed", rep_seed},
                     {"lambda_biased", lam_b},
                     {"lambda_unbiased", lam_u},
                     {"err_biased_exact", err_exact},
                     {"err_biased_soft", err_soft_b},
                     {"err_unbiased_soft", err_soft_u}};
        (*os) << line.dump() << "\n";
    }
    json summary = {{"summary", true},
                    {"replicates", replicates},
                    {"mean_err_biased_exact", sum_exact / replicates},
                    {"mean_err_biased_soft", sum_soft_b / replicates},
                    {"mean_err_unbiased_soft", sum_soft_u / replicates}};
    (*os) << summary.dump() << "\n";
    return kOk;
}

int cmd_texture_analyze(const std::string& image_path, const std::string& box_spec,
                        double lambda, int grid_n, const std::string& out_path,
                        const std::string& spectrum_path) {
    DataRecord img = read_image_file(image_path);
    // graymaps get the midpoint threshold; bitmaps are already 0/1
    double lo = img.values().real().minCoeff(), hi = img.values().real().maxCoeff();
    if (hi > 1.0 || lo < 0.0) img = binarize_midpoint(img);
    const std::vector<int> radii = parse_int_list(box_spec, "--lambda-box");
    const IndexSet set = IndexSet::box(radii);
    SolverConfig cfg(make_grid(static_cast<int>(radii.size()), grid_n, true));
    const WeightMatrix w = WeightMatrix::scalar(set, lambda);

    const WienerModel model = identify(img, set, w, cfg);
    write_model_file(out_path, model);
    std::cout << "tau " << model.tau << "\n"
              << "clamped_lags " << model.clamped_lags << "\n"
              << "filter_reconstruction_error " << model.filter.reconstruction_error << "\n"
              << "wrote " << out_path << "\n";
    if (!spectrum_path.empty()) {
        const GridSpec sg(cfg.grid.shape(), false);
        const GridField pf = synthesize(model.p, sg);
        const GridField qf = synthesize(model.q, sg);
        const double floor = 1e-13 * std::max(qf.values().cwiseAbs().maxCoeff(), 1e-300);
        write_field_csv_file(
            spectrum_path,
            GridField(sg, (pf.values().array() / qf.values().array().max(floor)).matrix()));
    }
    return kOk;
}

int cmd_texture_synth(const std::string& model_path, const std::string& size_spec,
                      std::uint64_t seed, const std::string& out_path) {
    const WienerModel model = read_model_file(model_path);
    std::vector<int> size = parse_int_list(size_spec, "--size");
    if (size.size() == 1 && model.filter.shape.size() == 2) size.push_back(size[0]);
    const DataRecord tex = synthesize_texture(model, size, seed);
    if (out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".pgm")
        write_image_p5_file(out_path, tex);
    else
        write_image_p4_file(out_path, tex);
    std::cout << "mean " << tex.values().real().mean() << "\n"
              << "wrote " << out_path << "\n";
    return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"rational covariance extension toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value configuration file");
    app.get_config_formatter_base()->comment('#');

    // estimate
    std::string est_data, est_box, est_mode = "biased", est_out = "cov.txt";
    auto* est = app.add_subcommand("estimate", "covariance estimates from a data record");
    est->add_option("--data", est_data, "data record file")->required();
    est->add_option("--lambda-box", est_box, "per-axis max index, comma separated")->required();
    est->add_option("--mode", est_mode)->check(CLI::IsMember({"biased", "unbiased"}));
    est->add_option("--out", est_out, "output covariance file");

    // solve
    std::string sol_cov, sol_prior = "me", sol_mode = "soft", sol_weight, sol_out = "solution.txt",
                sol_spectrum;
    int sol_grid = 0;
    bool sol_offset = true;
    auto* sol = app.add_subcommand("solve", "exact/soft/hard covariance matching");
    sol->add_option("--cov", sol_cov, "covariance file")->required();
    sol->add_option("--prior", sol_prior, "prior coefficient file, or 'me' for P == 1");
    sol->add_option("--mode", sol_mode)->check(CLI::IsMember({"exact", "soft", "hard"}));
    sol->add_option("--weight", sol_weight, "scalar:<lambda> or file:<path>");
    sol->add_option("--grid", sol_grid, "points per axis (0: per-dimension default)");
    sol->add_flag("--offset,!--aligned", sol_offset, "half-sample offset grid (default on)");
    sol->add_option("--out", sol_out, "solution file");
    sol->add_option("--spectrum", sol_spectrum, "optional CSV of P/Q samples");

    // convert-weight
    std::string cw_solution, cw_direction = "soft2hard", cw_out = "weight.txt";
    auto* cw = app.add_subcommand("convert-weight", "map a weight between formulations");
    cw->add_option("--solution", cw_solution, "solution file with a weight section")->required();
    cw->add_option("--direction", cw_direction)
        ->check(CLI::IsMember({"soft2hard", "hard2soft"}));
    cw->add_option("--out", cw_out, "output weight file");

    // analyze
    std::string an_cov, an_prior = "me", an_weight;
    std::uint64_t an_seed = 1;
    auto* an = app.add_subcommand("analyze", "bound margins and cone surrogates");
    an->add_option("--cov", an_cov, "covariance file")->required();
    an->add_option("--prior", an_prior, "prior coefficient file, or 'me'");
    an->add_option("--weight", an_weight, "scalar:<lambda> or file:<path>")->required();
    an->add_option("--seed", an_seed, "seed for the cone probes");

    // simulate
    int sim_steps = 500, sim_window = 9, sim_replicates = 1, sim_grid = 0;
    std::uint64_t sim_seed = 1;
    std::string sim_system = "default", sim_out, sim_summary;
    auto* sim = app.add_subcommand("simulate", "recursive-filter study at configurable scale");
    sim->add_option("--system", sim_system)->check(CLI::IsMember({"default"}));
    sim->add_option("--N", sim_steps, "steps per axis");
    sim->add_option("--window", sim_window, "trailing window for estimation");
    sim->add_option("--seed", sim_seed, "base seed; replicate r uses seed + r");
    sim->add_option("--replicates", sim_replicates);
    sim->add_option("--grid", sim_grid, "solver grid points per axis (0: default)");
    sim->add_option("--out", sim_out, "directory for windowed data records");
    sim->add_option("--summary", sim_summary, "JSON-lines summary file (default: stdout)");

    // texture
    auto* tex = app.add_subcommand("texture", "binary texture identification and synthesis");
    tex->require_subcommand(1);
    std::string ta_image, ta_box = "2,2", ta_out = "model.txt", ta_spectrum;
    double ta_lambda = 0.01;
    int ta_grid = 0;
    auto* ta = tex->add_subcommand("analyze", "identify a model from a binary image");
    ta->add_option("--image", ta_image, "P4/P5 image")->required();
    ta->add_option("--lambda-box", ta_box, "per-axis max index");
    ta->add_option("--lambda", ta_lambda, "soft weight W = lambda I");
    ta->add_option("--grid", ta_grid, "solver grid points per axis (0: default)");
    ta->add_option("--out", ta_out, "model file");
    ta->add_option("--spectrum", ta_spectrum, "optional CSV of the estimated spectrum");

    std::string ts_model, ts_size = "500", ts_out = "texture.pbm";
    std::uint64_t ts_seed = 1;
    auto* ts = tex->add_subcommand("synth", "generate a texture from a model file");
    ts->add_option("--model", ts_model, "model file")->required();
    ts->add_option("--size", ts_size, "output size per axis");
    ts->add_option("--seed", ts_seed);
    ts->add_option("--out", ts_out, "output image (.pbm bitmap or .pgm graymap)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    echo_config(app);

    try {
        if (est->parsed()) return cmd_estimate(est_data, est_box, est_mode, est_out);
        if (sol->parsed())
            return cmd_solve(sol_cov, sol_prior, sol_mode, sol_weight, sol_grid, sol_offset,
                             sol_out, sol_spectrum);
        if (cw->parsed()) return cmd_convert_weight(cw_solution, cw_direction, cw_out);
        if (an->parsed()) return cmd_analyze(an_cov, an_prior, an_weight, an_seed);
        if (sim->parsed())
            return cmd_simulate(sim_steps, sim_window, sim_seed, sim_replicates, sim_grid,
                                sim_out, sim_summary);
        if (tex->parsed()) {
            if (ta->parsed())
                return cmd_texture_analyze(ta_image, ta_box, ta_lambda, ta_grid, ta_out,
                                           ta_spectrum);
            return cmd_texture_synth(ts_model, ts_size, ts_seed, ts_out);
        }
    } catch (const NoSolutionError& e) {
        std::cerr << "no solution: " << e.what() << "\n";
        std::cerr << "sufficient condition W > cc* " << (e.weight_condition_held ? "held" : "did not hold")
                  << (e.weight_condition_held
                          ? " (failure looks numerical; try a finer grid)"
                          : " (the feasibility ball may miss the moment cone; enlarge W)")
                  << "\n";
        return kNoSolution;
    } catch (const SolverDivergence& e) {
        std::cerr << "solver divergence: " << e.what() << "\n";
        return kNumerical;
    } catch (const FileFormatError& e) {
        std::cerr << "file error: " << e.what() << "\n";
        return kBadFile;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kInconsistent;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return kUsage;
}

}  // namespace rcext_cli
