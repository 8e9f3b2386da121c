// Command-line front end: fit, path, cv, weights, simulate, oracle-check, re.
// Exit codes: 0 success, 1 input/usage error, 2 numerical non-convergence.

#include "slogit/io.hpp"
#include "slogit/model.hpp"
#include "slogit/oracle_bounds.hpp"
#include "slogit/re_condition.hpp"
#include "slogit/simulation.hpp"
#include "slogit/solver.hpp"
#include "slogit/weights.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace slogit;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotConverged = 2;

struct CommonOpts {
    std::uint64_t seed = 0;
    std::string config;
};

// --config JSON: values override parsed flags; unknown keys are rejected.
json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError("config file: top level must be an object");
    return j;
}

template <typename T>
bool take(json& cfg, const char* key, T& out) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return false;
    try {
        out = it->template get<T>();
    } catch (const json::exception&) {
        throw ParseError(std::string("config file: bad value for key '") + key + "'");
    }
    cfg.erase(it);
    return true;
}

void reject_leftover(const json& cfg) {
    if (cfg.empty()) return;
    std::string keys;
    for (const auto& [k, v] : cfg.items()) {
        (void)v;
        if (!keys.empty()) keys += ", ";
        keys += k;
    }
    throw ParseError("config file: unknown keys: " + keys);
}

struct DataOpts {
    std::string data_path;
    std::string groups_path;
    std::string weights_kind = "unit";
    std::string weights_file;
    std::string variances_file;
    double x = 2.0;
    double c2 = 0.0;
};

void add_data_opts(CLI::App* cmd, DataOpts& o, bool weights_relevant = true) {
    cmd->add_option("--data", o.data_path, "dataset CSV (header y,x1,...,xp[,f0])")
        ->required();
    cmd->add_option("--groups", o.groups_path,
                    "groups JSON (array of arrays of 1-based column indices); "
                    "enables group mode");
    if (weights_relevant) {
        cmd->add_option("--weights", o.weights_kind,
                        "unit | sqrt-size | bernstein | theoretical")
            ->default_val("unit");
        cmd->add_option("--weights-file", o.weights_file,
                        "CSV of per-unit weights (overrides --weights)");
        cmd->add_option("--variances-file", o.variances_file,
                        "per-observation variances for theoretical weights");
    }
    cmd->add_option("--x", o.x, "tail parameter x")->default_val(2.0);
    cmd->add_option("--c2", o.c2, "envelope on |X_ij| (0 = auto max|X_ij|)")
        ->default_val(0.0);
}

struct LoadedProblem {
    Dataset data;
    std::optional<GroupStructure> groups;
    PenaltyWeights weights;
};

LoadedProblem load_problem(const DataOpts& o) {
    LoadedProblem prob;
    prob.data = read_dataset_csv(o.data_path);
    if (!o.groups_path.empty())
        prob.groups = read_groups_json(o.groups_path, prob.data.p());
    const bool group_mode = prob.groups.has_value();
    const std::size_t units = group_mode ? prob.groups->num_groups() : prob.data.p();
    const TailParams tail{o.x, o.c2};

    if (!o.weights_file.empty()) {
        prob.weights.values = read_weights_csv(o.weights_file);
        prob.weights.mode = group_mode ? WeightMode::group : WeightMode::coefficient;
        if (prob.weights.values.size() != units)
            throw ParseError("weights file has " +
                             std::to_string(prob.weights.values.size()) +
                             " rows, expected " + std::to_string(units));
    } else if (o.weights_kind == "unit") {
        prob.weights =
            unit_weights(units, group_mode ? WeightMode::group : WeightMode::coefficient);
    } else if (o.weights_kind == "sqrt-size") {
        if (!group_mode) throw ParseError("--weights sqrt-size requires --groups");
        prob.weights = sqrt_size_group_weights(*prob.groups);
    } else if (o.weights_kind == "bernstein") {
        prob.weights = group_mode
                           ? group_bernstein_weights(prob.data, *prob.groups, tail)
                           : lasso_bernstein_weights(prob.data, tail);
    } else if (o.weights_kind == "theoretical") {
        Vector variances;
        if (!o.variances_file.empty()) {
            variances = read_values_csv(o.variances_file);
        } else if (prob.data.has_f0()) {
            variances.resize(prob.data.n());
            for (std::size_t i = 0; i < prob.data.n(); ++i) {
                const double pi = sigmoid((*prob.data.f0)[i]);
                variances[i] = std::clamp(pi * (1.0 - pi), 0.0, 0.25);
            }
        } else {
            throw ParseError("theoretical weights need --variances-file or an f0 column");
        }
        prob.weights =
            group_mode
                ? group_theoretical_weights(prob.data, *prob.groups, tail, variances)
                : lasso_theoretical_weights(prob.data, tail, variances);
    } else {
        throw ParseError("unknown --weights kind '" + o.weights_kind + "'");
    }
    prob.weights.validate();
    return prob;
}

SimMode parse_mode(const std::string& mode) {
    if (mode == "lasso") return SimMode::lasso;
    if (mode == "group") return SimMode::group;
    throw ParseError("unknown --mode '" + mode + "' (lasso|group)");
}

std::vector<WeightMethod> parse_methods(const std::string& csv) {
    std::vector<WeightMethod> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "unweighted") out.push_back(WeightMethod::unweighted);
        else if (tok == "bernstein") out.push_back(WeightMethod::bernstein);
        else if (tok == "theoretical") out.push_back(WeightMethod::theoretical);
        else if (tok == "plugin-lasso") out.push_back(WeightMethod::plugin_lasso);
        else if (tok == "plugin-logit") out.push_back(WeightMethod::plugin_logit);
        else throw ParseError("unknown method '" + tok + "'");
    }
    if (out.empty()) throw ParseError("--methods list is empty");
    return out;
}

std::string oracle_check_rows_csv(const OracleCheckReport& rep, std::uint64_t seed,
                                  bool re_bounds) {
    std::ostringstream out;
    out << "# seed=" << seed << "\n";
    out << "replicate,event,converged,kkt,excess_risk,slow_bound,slow_violation";
    if (re_bounds)
        out << ",mu,mu_eta,mu2_raw,obs_norm_sq,obs_est,obs_lq,col_excess_bound,"
               "col_norm_bound,col_est_bound,col_lq_bound,fast_excess_bound,"
               "fast_norm_bound,side_condition,theo_excess_bound,theo_est_bound,"
               "theo_lq_bound,theo_pred_bound,col_violation,fast_violation,"
               "theo_violation";
    out << "\n";
    for (const OracleCheckRow& r : rep.rows) {
        out << r.replicate << ',' << (r.event ? 1 : 0) << ',' << (r.converged ? 1 : 0)
            << ',' << format_double(r.kkt) << ',' << format_double(r.excess_risk) << ','
            << format_double(r.slow_bound) << ',' << (r.slow_violation ? 1 : 0);
        if (re_bounds) {
            out << ',' << format_double(r.mu) << ',' << format_double(r.mu_eta) << ','
                << format_double(r.mu2_raw) << ',' << format_double(r.obs_norm_sq) << ','
                << format_double(r.obs_est) << ',' << format_double(r.obs_lq) << ','
                << format_double(r.col_excess_bound) << ','
                << format_double(r.col_norm_bound) << ','
                << format_double(r.col_est_bound) << ','
                << format_double(r.col_lq_bound) << ','
                << format_double(r.fast_excess_bound) << ','
                << format_double(r.fast_norm_bound) << ',' << (r.side_condition ? 1 : 0)
                << ',' << format_double(r.theo_excess_bound) << ','
                << format_double(r.theo_est_bound) << ','
                << format_double(r.theo_lq_bound) << ','
                << format_double(r.theo_pred_bound) << ',' << (r.col_violation ? 1 : 0)
                << ',' << (r.fast_violation ? 1 : 0) << ',' << (r.theo_violation ? 1 : 0);
        }
        out << "\n";
    }
    return out.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted lasso / group lasso for logistic regression"};
    app.require_subcommand(1);

    // ---- fit ----------------------------------------------------------
    auto* fit_cmd = app.add_subcommand("fit", "penalized fit at a single r");
    DataOpts fit_data;
    add_data_opts(fit_cmd, fit_data);
    double fit_r = 0.0;
    FitConfig fit_cfg;
    std::string fit_out = "fit.json";
    CommonOpts fit_common;
    fit_cmd->add_option("--r", fit_r, "penalty level")->required();
    fit_cmd->add_option("--tol", fit_cfg.tol)->default_val(1e-7);
    fit_cmd->add_option("--max-iter", fit_cfg.max_iter)->default_val(10000);
    fit_cmd->add_flag("--intercept", fit_cfg.use_intercept,
                      "fit an unpenalized intercept");
    fit_cmd->add_option("--out", fit_out)->default_val("fit.json");
    fit_cmd->add_option("--seed", fit_common.seed)->default_val(0);
    fit_cmd->add_option("--config", fit_common.config, "JSON overriding flags");

    // ---- path ---------------------------------------------------------
    auto* path_cmd = app.add_subcommand("path", "warm-started regularization path");
    DataOpts path_data;
    add_data_opts(path_cmd, path_data);
    PathSpec path_spec;
    FitConfig path_cfg;
    std::string path_out = "path.csv";
    CommonOpts path_common;
    path_cmd->add_option("--count", path_spec.count)->default_val(100);
    path_cmd->add_option("--r-min-ratio", path_spec.r_min_ratio)->default_val(0.01);
    path_cmd->add_option("--tol", path_cfg.tol)->default_val(1e-7);
    path_cmd->add_option("--max-iter", path_cfg.max_iter)->default_val(10000);
    path_cmd->add_option("--out", path_out)->default_val("path.csv");
    path_cmd->add_option("--seed", path_common.seed)->default_val(0);
    path_cmd->add_option("--config", path_common.config, "JSON overriding flags");

    // ---- cv -----------------------------------------------------------
    auto* cv_cmd = app.add_subcommand("cv", "cross-validate the penalty level");
    DataOpts cv_data;
    add_data_opts(cv_cmd, cv_data);
    PathSpec cv_grid;
    int cv_folds = 5;
    std::string cv_out = "cv.json";
    CommonOpts cv_common;
    cv_cmd->add_option("--count", cv_grid.count)->default_val(100);
    cv_cmd->add_option("--r-min-ratio", cv_grid.r_min_ratio)->default_val(0.01);
    cv_cmd->add_option("--folds", cv_folds)->default_val(5);
    cv_cmd->add_option("--out", cv_out)->default_val("cv.json");
    cv_cmd->add_option("--seed", cv_common.seed)->default_val(0);
    cv_cmd->add_option("--config", cv_common.config, "JSON overriding flags");

    // ---- weights ------------------------------------------------------
    auto* w_cmd = app.add_subcommand("weights", "compute penalty weights");
    DataOpts w_data;
    add_data_opts(w_cmd, w_data, /*weights_relevant=*/false);
    std::string w_kind = "bernstein";
    std::string w_out = "weights.csv";
    std::string w_variances_file;
    int w_cv_count = 25;
    double w_cv_ratio = 0.01;
    int w_cv_folds = 5;
    CommonOpts w_common;
    w_cmd->add_option("--kind", w_kind,
                      "unit | sqrt-size | bernstein | theoretical | plugin-lasso | "
                      "plugin-logit")
        ->default_val("bernstein");
    w_cmd->add_option("--variances-file", w_variances_file,
                      "per-observation variances for theoretical weights");
    w_cmd->add_option("--cv-count", w_cv_count)->default_val(25);
    w_cmd->add_option("--cv-r-min-ratio", w_cv_ratio)->default_val(0.01);
    w_cmd->add_option("--folds", w_cv_folds)->default_val(5);
    w_cmd->add_option("--out", w_out)->default_val("weights.csv");
    w_cmd->add_option("--seed", w_common.seed)->default_val(0);
    w_cmd->add_option("--config", w_common.config, "JSON overriding flags");

    // ---- simulate -----------------------------------------------------
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo protocol");
    SimSpec sim_spec;
    std::string sim_mode = "lasso";
    std::string sim_methods = "unweighted,bernstein,theoretical";
    std::string sim_prefix = "simulation";
    CommonOpts sim_common;
    sim_cmd->add_option("--mode", sim_mode, "lasso | group")->default_val("lasso");
    sim_cmd->add_option("--n", sim_spec.n)->default_val(200);
    sim_cmd->add_option("--p", sim_spec.p)->default_val(203);
    sim_cmd->add_option("--g", sim_spec.num_groups)->default_val(8);
    sim_cmd->add_option("--nk", sim_spec.relevant_group_size)->default_val(5);
    sim_cmd->add_option("--nkc", sim_spec.irrelevant_group_size)->default_val(20);
    sim_cmd->add_option("--x", sim_spec.x)->default_val(2.0);
    sim_cmd->add_option("--count", sim_spec.grid.count)->default_val(100);
    sim_cmd->add_option("--r-min-ratio", sim_spec.grid.r_min_ratio)->default_val(0.01);
    sim_cmd->add_option("--replicates", sim_spec.replicates)->default_val(100);
    sim_cmd->add_option("--methods", sim_methods,
                        "comma list: unweighted,bernstein,theoretical,plugin-lasso,"
                        "plugin-logit");
    sim_cmd->add_option("--out-prefix", sim_prefix)->default_val("simulation");
    sim_cmd->add_option("--seed", sim_common.seed)->default_val(0);
    sim_cmd->add_option("--config", sim_common.config, "JSON overriding flags");

    // ---- oracle-check -------------------------------------------------
    auto* oc_cmd =
        app.add_subcommand("oracle-check", "per-replicate oracle-inequality audit");
    OracleCheckSpec oc_spec;
    std::string oc_mode = "lasso";
    std::string oc_prefix = "oracle_check";
    double oc_C0 = -1.0;
    CommonOpts oc_common;
    oc_cmd->add_option("--mode", oc_mode, "lasso | group")->default_val("lasso");
    oc_cmd->add_option("--n", oc_spec.sim.n)->default_val(100);
    oc_cmd->add_option("--p", oc_spec.sim.p)->default_val(10);
    oc_cmd->add_option("--g", oc_spec.sim.num_groups)->default_val(5);
    oc_cmd->add_option("--nk", oc_spec.sim.relevant_group_size)->default_val(2);
    oc_cmd->add_option("--nkc", oc_spec.sim.irrelevant_group_size)->default_val(2);
    oc_cmd->add_option("--x", oc_spec.sim.x)->default_val(2.0);
    oc_cmd->add_option("--replicates", oc_spec.sim.replicates)->default_val(100);
    oc_cmd->add_option("--r", oc_spec.r)->default_val(1.0);
    oc_cmd->add_option("--eta", oc_spec.eta)->default_val(1.0);
    oc_cmd->add_option("--q", oc_spec.q)->default_val(2.0);
    oc_cmd->add_option("--C0", oc_C0, "envelope constant (< 0 = per-replicate auto)")
        ->default_val(-1.0);
    oc_cmd->add_flag("--re-bounds", oc_spec.re_bounds,
                     "compute RE-based corollary/fast-rate bounds");
    oc_cmd->add_option("--re-dirs", oc_spec.re_budget.directions)->default_val(300);
    oc_cmd->add_option("--re-steps", oc_spec.re_budget.descent_steps)->default_val(25);
    oc_cmd->add_option("--out-prefix", oc_prefix)->default_val("oracle_check");
    oc_cmd->add_option("--seed", oc_common.seed)->default_val(0);
    oc_cmd->add_option("--config", oc_common.config, "JSON overriding flags");

    // ---- re -----------------------------------------------------------
    auto* re_cmd = app.add_subcommand("re", "restricted-eigenvalue estimate");
    DataOpts re_data;
    add_data_opts(re_cmd, re_data, /*weights_relevant=*/false);
    std::string re_kind = "lasso";
    ReQuery re_query;
    ReBudget re_budget;
    std::string re_variances_file;
    std::string re_out = "re.json";
    CommonOpts re_common;
    re_cmd->add_option("--kind", re_kind, "lasso | group | weighted-group")
        ->default_val("lasso");
    re_cmd->add_option("--s", re_query.s)->required();
    re_cmd->add_option("--a0", re_query.a0)->default_val(3.0);
    re_cmd->add_option("--dirs", re_budget.directions)->default_val(2000);
    re_cmd->add_option("--steps", re_budget.descent_steps)->default_val(50);
    re_cmd->add_flag("--allow-sampling", re_budget.allow_subset_sampling,
                     "sample subsets when enumeration is infeasible");
    re_cmd->add_option("--sampled-subsets", re_budget.sampled_subsets)->default_val(4096);
    re_cmd->add_option("--variances-file", re_variances_file,
                       "diag of D for weighted-group (defaults to f0-derived)");
    re_cmd->add_option("--out", re_out)->default_val("re.json");
    re_cmd->add_option("--seed", re_common.seed)->default_val(0);
    re_cmd->add_option("--config", re_common.config, "JSON overriding flags");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (*fit_cmd) {
            if (!fit_common.config.empty()) {
                json cfg = load_config(fit_common.config);
                take(cfg, "data", fit_data.data_path);
                take(cfg, "groups", fit_data.groups_path);
                take(cfg, "weights", fit_data.weights_kind);
                take(cfg, "weights-file", fit_data.weights_file);
                take(cfg, "variances-file", fit_data.variances_file);
                take(cfg, "x", fit_data.x);
                take(cfg, "c2", fit_data.c2);
                take(cfg, "r", fit_r);
                take(cfg, "tol", fit_cfg.tol);
                take(cfg, "max-iter", fit_cfg.max_iter);
                take(cfg, "intercept", fit_cfg.use_intercept);
                take(cfg, "out", fit_out);
                take(cfg, "seed", fit_common.seed);
                reject_leftover(cfg);
            }
            LoadedProblem prob = load_problem(fit_data);
            const FitResult fit = prob.groups
                                      ? fit_group_lasso(prob.data, *prob.groups,
                                                        prob.weights, fit_r, fit_cfg)
                                      : fit_lasso(prob.data, prob.weights, fit_r, fit_cfg);
            atomic_write(fit_out,
                         fit_result_to_json(fit, prob.weights.mode, fit_common.seed));
            std::cout << (fit.converged ? "converged" : "NOT converged")
                      << " iterations=" << fit.iterations
                      << " kkt=" << format_double(fit.kkt_residual)
                      << " active=" << fit.active.size() << "\n";
            return fit.converged ? kExitOk : kExitNotConverged;
        }

        if (*path_cmd) {
            if (!path_common.config.empty()) {
                json cfg = load_config(path_common.config);
                take(cfg, "data", path_data.data_path);
                take(cfg, "groups", path_data.groups_path);
                take(cfg, "weights", path_data.weights_kind);
                take(cfg, "weights-file", path_data.weights_file);
                take(cfg, "variances-file", path_data.variances_file);
                take(cfg, "x", path_data.x);
                take(cfg, "c2", path_data.c2);
                take(cfg, "count", path_spec.count);
                take(cfg, "r-min-ratio", path_spec.r_min_ratio);
                take(cfg, "tol", path_cfg.tol);
                take(cfg, "max-iter", path_cfg.max_iter);
                take(cfg, "out", path_out);
                take(cfg, "seed", path_common.seed);
                reject_leftover(cfg);
            }
            LoadedProblem prob = load_problem(path_data);
            const GroupStructure* gptr = prob.groups ? &*prob.groups : nullptr;
            const std::vector<FitResult> path =
                regularization_path(prob.data, prob.weights, gptr, path_spec, path_cfg);
            atomic_write(path_out, path_to_csv(path, path_common.seed));
            int bad = 0;
            for (const FitResult& f : path) bad += f.converged ? 0 : 1;
            std::cout << "path points=" << path.size() << " non_converged=" << bad << "\n";
            return bad == 0 ? kExitOk : kExitNotConverged;
        }

        if (*cv_cmd) {
            if (!cv_common.config.empty()) {
                json cfg = load_config(cv_common.config);
                take(cfg, "data", cv_data.data_path);
                take(cfg, "groups", cv_data.groups_path);
                take(cfg, "weights", cv_data.weights_kind);
                take(cfg, "weights-file", cv_data.weights_file);
                take(cfg, "variances-file", cv_data.variances_file);
                take(cfg, "x", cv_data.x);
                take(cfg, "c2", cv_data.c2);
                take(cfg, "count", cv_grid.count);
                take(cfg, "r-min-ratio", cv_grid.r_min_ratio);
                take(cfg, "folds", cv_folds);
                take(cfg, "out", cv_out);
                take(cfg, "seed", cv_common.seed);
                reject_leftover(cfg);
            }
            LoadedProblem prob = load_problem(cv_data);
            const GroupStructure* gptr = prob.groups ? &*prob.groups : nullptr;
            const double rmax = r_max(prob.data, prob.weights, gptr);
            const Vector grid = path_grid(rmax, cv_grid);
            Vector deviance;
            const double selected = cross_validate_r(
                prob.data, prob.weights, gptr, grid, cv_folds, cv_common.seed, {},
                &deviance);
            json j;
            j["seed"] = cv_common.seed;
            j["selected_r"] = selected;
            j["folds"] = cv_folds;
            j["grid"] = grid;
            j["mean_deviance"] = deviance;
            atomic_write(cv_out, j.dump(2) + "\n");
            std::cout << "selected_r=" << format_double(selected) << "\n";
            return kExitOk;
        }

        if (*w_cmd) {
            if (!w_common.config.empty()) {
                json cfg = load_config(w_common.config);
                take(cfg, "data", w_data.data_path);
                take(cfg, "groups", w_data.groups_path);
                take(cfg, "variances-file", w_variances_file);
                take(cfg, "x", w_data.x);
                take(cfg, "c2", w_data.c2);
                take(cfg, "kind", w_kind);
                take(cfg, "cv-count", w_cv_count);
                take(cfg, "cv-r-min-ratio", w_cv_ratio);
                take(cfg, "folds", w_cv_folds);
                take(cfg, "out", w_out);
                take(cfg, "seed", w_common.seed);
                reject_leftover(cfg);
            }
            PenaltyWeights weights;
            if (w_kind == "plugin-lasso" || w_kind == "plugin-logit") {
                Dataset data = read_dataset_csv(w_data.data_path);
                std::optional<GroupStructure> groups;
                if (!w_data.groups_path.empty())
                    groups = read_groups_json(w_data.groups_path, data.p());
                CvControl cv;
                cv.grid_count = w_cv_count;
                cv.r_min_ratio = w_cv_ratio;
                cv.folds = w_cv_folds;
                cv.seed = w_common.seed;
                const VarianceEstimate est = estimate_variances(
                    data,
                    w_kind == "plugin-lasso" ? VarianceMethod::plugin_lasso
                                             : VarianceMethod::lasso_then_logit,
                    cv);
                const TailParams tail{w_data.x, w_data.c2};
                weights = groups
                              ? group_theoretical_weights(data, *groups, tail,
                                                          est.variances)
                              : lasso_theoretical_weights(data, tail, est.variances);
            } else {
                w_data.weights_kind = w_kind;
                w_data.variances_file = w_variances_file;
                weights = load_problem(w_data).weights;
            }
            atomic_write(w_out, weights_to_csv(weights, w_common.seed));
            std::cout << "weights=" << weights.values.size()
                      << " max=" << format_double(weights.max())
                      << " min=" << format_double(weights.min()) << "\n";
            return kExitOk;
        }

        if (*sim_cmd) {
            if (!sim_common.config.empty()) {
                json cfg = load_config(sim_common.config);
                take(cfg, "mode", sim_mode);
                take(cfg, "n", sim_spec.n);
                take(cfg, "p", sim_spec.p);
                take(cfg, "g", sim_spec.num_groups);
                take(cfg, "nk", sim_spec.relevant_group_size);
                take(cfg, "nkc", sim_spec.irrelevant_group_size);
                take(cfg, "x", sim_spec.x);
                take(cfg, "count", sim_spec.grid.count);
                take(cfg, "r-min-ratio", sim_spec.grid.r_min_ratio);
                take(cfg, "replicates", sim_spec.replicates);
                take(cfg, "methods", sim_methods);
                take(cfg, "out-prefix", sim_prefix);
                take(cfg, "seed", sim_common.seed);
                reject_leftover(cfg);
            }
            sim_spec.mode = parse_mode(sim_mode);
            sim_spec.seed = sim_common.seed;
            const MonteCarloReport report =
                run_monte_carlo(sim_spec, parse_methods(sim_methods));
            atomic_write(sim_prefix + "_rows.csv",
                         monte_carlo_rows_csv(report, sim_common.seed));
            atomic_write(sim_prefix + "_agg.csv",
                         monte_carlo_aggregates_csv(report, sim_common.seed));
            std::cout << "fits=" << report.total_fits
                      << " non_converged=" << report.nonconverged_fits
                      << " violations=" << report.violation_count << "\n";
            return kExitOk;
        }

        if (*oc_cmd) {
            if (!oc_common.config.empty()) {
                json cfg = load_config(oc_common.config);
                take(cfg, "mode", oc_mode);
                take(cfg, "n", oc_spec.sim.n);
                take(cfg, "p", oc_spec.sim.p);
                take(cfg, "g", oc_spec.sim.num_groups);
                take(cfg, "nk", oc_spec.sim.relevant_group_size);
                take(cfg, "nkc", oc_spec.sim.irrelevant_group_size);
                take(cfg, "x", oc_spec.sim.x);
                take(cfg, "replicates", oc_spec.sim.replicates);
                take(cfg, "r", oc_spec.r);
                take(cfg, "eta", oc_spec.eta);
                take(cfg, "q", oc_spec.q);
                take(cfg, "C0", oc_C0);
                take(cfg, "re-bounds", oc_spec.re_bounds);
                take(cfg, "re-dirs", oc_spec.re_budget.directions);
                take(cfg, "re-steps", oc_spec.re_budget.descent_steps);
                take(cfg, "out-prefix", oc_prefix);
                take(cfg, "seed", oc_common.seed);
                reject_leftover(cfg);
            }
            oc_spec.sim.mode = parse_mode(oc_mode);
            oc_spec.sim.seed = oc_common.seed;
            oc_spec.re_budget.seed = oc_common.seed;
            if (oc_C0 >= 0.0) oc_spec.C0 = oc_C0;
            const OracleCheckReport report = oracle_check(oc_spec);
            atomic_write(oc_prefix + ".csv",
                         oracle_check_rows_csv(report, oc_common.seed, oc_spec.re_bounds));
            json j;
            j["seed"] = oc_common.seed;
            j["replicates"] = oc_spec.sim.replicates;
            j["events"] = report.events;
            j["converged"] = report.converged;
            j["slow_violations"] = report.slow_violations;
            j["col_violations"] = report.col_violations;
            j["fast_violations"] = report.fast_violations;
            j["theo_violations"] = report.theo_violations;
            j["side_condition_count"] = report.side_condition_count;
            atomic_write(oc_prefix + "_summary.json", j.dump(2) + "\n");
            std::cout << "events=" << report.events
                      << " slow_violations=" << report.slow_violations << "\n";
            return kExitOk;
        }

        if (*re_cmd) {
            if (!re_common.config.empty()) {
                json cfg = load_config(re_common.config);
                take(cfg, "data", re_data.data_path);
                take(cfg, "groups", re_data.groups_path);
                take(cfg, "x", re_data.x);
                take(cfg, "c2", re_data.c2);
                take(cfg, "kind", re_kind);
                take(cfg, "s", re_query.s);
                take(cfg, "a0", re_query.a0);
                take(cfg, "dirs", re_budget.directions);
                take(cfg, "steps", re_budget.descent_steps);
                take(cfg, "allow-sampling", re_budget.allow_subset_sampling);
                take(cfg, "sampled-subsets", re_budget.sampled_subsets);
                take(cfg, "variances-file", re_variances_file);
                take(cfg, "out", re_out);
                take(cfg, "seed", re_common.seed);
                reject_leftover(cfg);
            }
            Dataset data = read_dataset_csv(re_data.data_path);
            if (re_kind == "lasso") {
                re_query.kind = ReKind::lasso;
            } else if (re_kind == "group" || re_kind == "weighted-group") {
                if (re_data.groups_path.empty())
                    throw ParseError("--kind " + re_kind + " requires --groups");
                re_query.groups = read_groups_json(re_data.groups_path, data.p());
                re_query.kind =
                    re_kind == "group" ? ReKind::group : ReKind::weighted_group;
            } else {
                throw ParseError("unknown --kind '" + re_kind + "'");
            }
            if (re_query.kind == ReKind::weighted_group) {
                if (!re_variances_file.empty()) {
                    re_query.variances = read_values_csv(re_variances_file);
                } else if (data.has_f0()) {
                    Vector v(data.n());
                    for (std::size_t i = 0; i < data.n(); ++i) {
                        const double pi = sigmoid((*data.f0)[i]);
                        v[i] = std::clamp(pi * (1.0 - pi), 0.0, 0.25);
                    }
                    re_query.variances = std::move(v);
                } else {
                    throw ParseError(
                        "weighted-group needs --variances-file or an f0 column");
                }
            }
            re_budget.seed = re_common.seed;
            const ReEstimate est = re_constant(data.X, re_query, re_budget);
            json j;
            j["seed"] = re_common.seed;
            j["kind"] = re_kind;
            j["s"] = re_query.s;
            j["a0"] = re_query.a0;
            j["value"] = est.value;
            j["value_squared"] = est.value_squared();
            j["certified_upper"] = est.certified_upper;
            j["witness"] = est.witness;
            json idx = json::array();
            for (int u : est.witness_index_set) idx.push_back(u + 1);
            j["witness_index_set"] = idx;
            j["budget_used"] = est.budget_used;
            atomic_write(re_out, j.dump(2) + "\n");
            std::cout << "value=" << format_double(est.value)
                      << " budget_used=" << est.budget_used << "\n";
            return kExitOk;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotConverged;
    }
    return kExitInputError;
}
