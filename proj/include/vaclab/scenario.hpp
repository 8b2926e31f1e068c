#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vaclab/energy.hpp"
#include "vaclab/mol.hpp"
#include "vaclab/norms.hpp"
#include "vaclab/oracles.hpp"
#include "vaclab/picard.hpp"

namespace vaclab {

enum class ExperimentKind { single_run, kappa_sweep, picard_vs_mol, stability_probe, hardy_suite };
enum class SolverMethod { mol, picard };

struct Scenario {
    // [data]
    ProfileKind profile = ProfileKind::quadratic;
    double A = 1.0;
    double beta = 0.0;
    double delta = 0.0;
    double gamma = 2.0;
    double epsilon = 0.0;  // mollification radius, 0 disables smoothing
    // [solver]
    SolverMethod method = SolverMethod::mol;
    double kappa = 0.0;
    double dt = 1e-4;
    double t_final = 0.1;
    int n_modes = 32;
    double picard_tol = 1e-10;
    int max_iters = 60;
    int grid_panels = 24;
    // [experiment]
    ExperimentKind experiment = ExperimentKind::single_run;
    std::vector<double> kappa_list;
    double perturbation_eps = 0.0;
    bool has_perturbation_eps = false;
    std::string output_dir = ".";
    int threads = 1;

    std::string canonical_text;  // normalized config, hashed into every CSV
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline double parse_real(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double r = std::stod(v, &pos);
        require(pos == v.size(), ErrorCode::config_invalid, "malformed number for '" + key + "'");
        return r;
    } catch (const Error&) {
        throw;
    } catch (...) {
        fail(ErrorCode::config_invalid, "malformed number for '" + key + "'");
    }
}

}  // namespace detail

// Flat key = value config with [data], [solver], [experiment] sections.
inline Scenario parse_scenario(const std::string& text) {
    std::map<std::string, std::map<std::string, std::string>> kv;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = detail::trim(t.substr(1, t.size() - 2));
            require(section == "data" || section == "solver" || section == "experiment",
                    ErrorCode::config_invalid, "unknown section '" + section + "'");
            continue;
        }
        size_t eq = t.find('=');
        require(eq != std::string::npos, ErrorCode::config_invalid,
                "expected key = value, got '" + t + "'");
        require(!section.empty(), ErrorCode::config_invalid,
                "key '" + t + "' appears before any section header");
        kv[section][detail::trim(t.substr(0, eq))] = detail::trim(t.substr(eq + 1));
    }

    Scenario s;
    auto has = [&](const std::string& sec, const std::string& key) {
        auto it = kv.find(sec);
        return it != kv.end() && it->second.count(key) > 0;
    };
    auto get = [&](const std::string& sec, const std::string& key) { return kv[sec][key]; };
    auto real_opt = [&](const std::string& sec, const std::string& key, double& out) {
        if (has(sec, key)) out = detail::parse_real(key, get(sec, key));
    };
    auto int_opt = [&](const std::string& sec, const std::string& key, int& out) {
        if (has(sec, key)) out = static_cast<int>(detail::parse_real(key, get(sec, key)));
    };

    if (has("data", "profile")) {
        std::string p = get("data", "profile");
        if (p == "quadratic") s.profile = ProfileKind::quadratic;
        else if (p == "power_adjusted") s.profile = ProfileKind::power_adjusted;
        else fail(ErrorCode::config_invalid, "unknown profile '" + p + "'");
    }
    real_opt("data", "A", s.A);
    real_opt("data", "beta", s.beta);
    real_opt("data", "delta", s.delta);
    real_opt("data", "gamma", s.gamma);
    real_opt("data", "epsilon", s.epsilon);

    if (has("solver", "method")) {
        std::string m = get("solver", "method");
        if (m == "mol") s.method = SolverMethod::mol;
        else if (m == "picard") s.method = SolverMethod::picard;
        else fail(ErrorCode::config_invalid, "unknown method '" + m + "'");
    }
    real_opt("solver", "kappa", s.kappa);
    real_opt("solver", "dt", s.dt);
    require(has("solver", "t_final"), ErrorCode::config_invalid, "missing required key 't_final'");
    s.t_final = detail::parse_real("t_final", get("solver", "t_final"));
    int_opt("solver", "n_modes", s.n_modes);
    real_opt("solver", "picard_tol", s.picard_tol);
    int_opt("solver", "max_iters", s.max_iters);
    int_opt("solver", "grid_panels", s.grid_panels);

    std::string kind = has("experiment", "kind") ? get("experiment", "kind") : "single-run";
    if (kind == "single-run") s.experiment = ExperimentKind::single_run;
    else if (kind == "kappa-sweep") s.experiment = ExperimentKind::kappa_sweep;
    else if (kind == "picard-vs-mol") s.experiment = ExperimentKind::picard_vs_mol;
    else if (kind == "stability-probe") s.experiment = ExperimentKind::stability_probe;
    else if (kind == "hardy-suite") s.experiment = ExperimentKind::hardy_suite;
    else fail(ErrorCode::config_invalid, "unknown experiment kind '" + kind + "'");

    if (has("experiment", "kappa_list")) {
        std::istringstream ks(get("experiment", "kappa_list"));
        std::string tok;
        while (std::getline(ks, tok, ','))
            s.kappa_list.push_back(detail::parse_real("kappa_list", detail::trim(tok)));
    }
    if (has("experiment", "perturbation_eps")) {
        s.perturbation_eps = detail::parse_real("perturbation_eps", get("experiment", "perturbation_eps"));
        s.has_perturbation_eps = true;
    }
    if (has("experiment", "output_dir")) s.output_dir = get("experiment", "output_dir");

    // experiment-specific requirements
    if (s.experiment == ExperimentKind::kappa_sweep)
        require(!s.kappa_list.empty(), ErrorCode::config_invalid,
                "kappa-sweep requires 'kappa_list'");
    if (s.experiment == ExperimentKind::stability_probe)
        require(s.has_perturbation_eps, ErrorCode::config_invalid,
                "stability-probe requires 'perturbation_eps'");
    require(s.dt > 0.0 && s.t_final > 0.0, ErrorCode::config_invalid,
            "dt and t_final must be positive");
    require(s.gamma > 1.0 && s.gamma <= 5.0, ErrorCode::config_invalid,
            "gamma must lie in (1, 5]");
    if (s.method == SolverMethod::picard)
        require(s.gamma == 2.0, ErrorCode::config_invalid,
                "the fixed-point solver is specific to gamma = 2");
    require(s.epsilon >= 0.0 && s.epsilon < 0.25, ErrorCode::config_invalid,
            "epsilon must lie in [0, 0.25)");

    // canonical serialization for the hash: sorted sections/keys
    std::ostringstream canon;
    for (const auto& [sec, entries] : kv) {
        canon << '[' << sec << "]\n";
        for (const auto& [k, v] : entries) canon << k << '=' << v << '\n';
    }
    s.canonical_text = canon.str();
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::config_invalid, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

namespace detail {

inline InitialData scenario_data(const Scenario& s, GridPtr grid) {
    DensityProfile rho = make_density(s.profile, s.gamma, grid, s.A);
    double beta = s.beta, delta = s.delta;
    ScalarField u0 = field_from(grid, [beta, delta](const Taylor& x) { return beta * x + delta; }, 20);
    InitialData data = make_initial_data(u0, rho, s.kappa, 5);
    if (s.epsilon > 0.0) data = mollify(data, s.epsilon);
    return data;
}

inline Trajectory run_solver(const Scenario& s, const InitialData& data, double kappa) {
    if (s.method == SolverMethod::picard) {
        PicardOptions opt;
        opt.n_modes = s.n_modes;
        opt.dt = s.dt;
        opt.final_time = s.t_final;
        opt.tol = s.picard_tol;
        opt.max_iters = s.max_iters;
        return picard_solve(data, kappa, opt).trajectory;
    }
    MolOptions opt;
    opt.dt = s.dt;
    opt.final_time = s.t_final;
    return direct_mol_solve(data, kappa, s.gamma, opt);
}

inline long record_stride(const Trajectory& t) {
    long n = static_cast<long>(t.states.size()) - 1;
    return std::max<long>(1, n / 50);
}

inline void write_csv_header(std::ofstream& out, const Scenario& s,
                             const std::string& columns) {
    out << "# config_hash=" << std::hex << fnv1a(s.canonical_text) << std::dec << "\n"
        << columns << "\n";
}

inline void write_trajectory_csv(const std::filesystem::path& dir, const Scenario& s,
                                 const Trajectory& traj) {
    std::ofstream out(dir / "trajectory.csv");
    write_csv_header(out, s, "t,x_index,x,v,eta_x");
    long stride = record_stride(traj);
    for (size_t l = 0; l < traj.states.size(); l += static_cast<size_t>(stride)) {
        const FlowState& st = traj.states[l];
        for (long j = 0; j < st.v.size(); ++j)
            out << fmt17(st.t) << ',' << j << ',' << fmt17(traj.grid->nodes(j)) << ','
                << fmt17(st.v(j)) << ',' << fmt17(st.eta_x(j)) << "\n";
    }
}

inline std::vector<EnergySnapshot> write_energy_csv(const std::filesystem::path& dir,
                                                    const Scenario& s, const Trajectory& traj,
                                                    const DensityProfile& rho) {
    std::vector<EnergySnapshot> snaps;
    long stride = record_stride(traj);
    for (size_t l = 0; l < traj.states.size(); l += static_cast<size_t>(stride))
        snaps.push_back(energy_snapshot(traj.states[l], rho, traj.kappa));
    std::ofstream out(dir / "energy.csv");
    std::string cols = "t";
    for (const auto& [k, v] : snaps.front().components) cols += "," + k;
    cols += ",total,physical_energy,dissipated";
    write_csv_header(out, s, cols);
    size_t si = 0;
    for (size_t l = 0; l < traj.states.size(); l += static_cast<size_t>(stride), ++si) {
        const EnergySnapshot& e = snaps[si];
        out << fmt17(e.t);
        for (const auto& [k, v] : e.components) out << ',' << fmt17(v);
        out << ',' << fmt17(e.total) << ',' << fmt17(traj.states[l].energy) << ','
            << fmt17(traj.states[l].dissipated) << "\n";
    }
    return snaps;
}

// sup over recorded levels of the nodal L2 error against the affine oracle
inline double affine_oracle_error(const Trajectory& traj, const Scenario& s) {
    AffineOracle oracle(s.A, s.beta, s.delta, traj.kappa);
    double err = 0.0;
    long stride = record_stride(traj);
    for (size_t l = 0; l < traj.states.size(); l += static_cast<size_t>(stride)) {
        const FlowState& st = traj.states[l];
        AffineOracle::State os = oracle.state_at(st.t);
        Eigen::ArrayXd exact = os.hp * traj.grid->nodes + os.gp;
        err = std::max(err, std::sqrt(traj.grid->integrate((st.v - exact).square())));
    }
    return err;
}

inline bool oracle_applies(const Scenario& s) {
    return s.profile == ProfileKind::quadratic && s.gamma == 2.0 && s.epsilon == 0.0;
}

inline double traj_l2_difference(const Trajectory& a, const Trajectory& b) {
    size_t n = std::min(a.states.size(), b.states.size());
    double err = 0.0;
    for (size_t l = 0; l < n; ++l)
        err = std::max(err, std::sqrt(a.grid->integrate(
                                (a.states[l].v - b.states[l].v).square())));
    return err;
}

// ordered fan-out: run one job per item with at most `threads` in flight,
// results returned in item order
template <typename Item, typename Fn>
auto ordered_pool(const std::vector<Item>& items, int threads, Fn fn)
    -> std::vector<decltype(fn(items[0]))> {
    using R = decltype(fn(items[0]));
    std::vector<R> results(items.size());
    if (threads <= 1) {
        for (size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i]);
        return results;
    }
    size_t next = 0;
    while (next < items.size()) {
        size_t batch = std::min<size_t>(static_cast<size_t>(threads), items.size() - next);
        std::vector<std::future<R>> futs;
        for (size_t i = 0; i < batch; ++i)
            futs.push_back(std::async(std::launch::async, fn, std::cref(items[next + i])));
        for (size_t i = 0; i < batch; ++i) results[next + i] = futs[i].get();
        next += batch;
    }
    return results;
}

}  // namespace detail

struct RunReport {
    std::string text;
    std::optional<double> oracle_error;
};

// Execute a parsed scenario, writing its artifact set into output_dir.
inline RunReport run_scenario(const Scenario& s) {
    namespace fs = std::filesystem;
    fs::path dir(s.output_dir);
    fs::create_directories(dir);
    std::ostringstream rep;
    rep << "config_hash=" << std::hex << detail::fnv1a(s.canonical_text) << std::dec << "\n";
    RunReport out;

    GridPtr grid = Grid::make(s.grid_panels);

    auto report_bound = [&](const std::vector<EnergySnapshot>& snaps) {
        BoundReport b = check_bound(snaps, snaps.front().total);
        rep << "M0=" << detail::fmt17(b.M0) << "\nsup_E=" << detail::fmt17(b.sup_E)
            << "\nratio=" << detail::fmt17(b.ratio) << "\nT_good=" << detail::fmt17(b.T_good)
            << "\nfirst_violation_t="
            << (b.first_violation_t ? detail::fmt17(*b.first_violation_t) : "none")
            << "\nfit_c0=" << detail::fmt17(b.c0) << "\nfit_c1=" << detail::fmt17(b.c1)
            << "\nmax_energy_jump=" << detail::fmt17(b.max_jump) << "\n";
        return b;
    };

    switch (s.experiment) {
        case ExperimentKind::single_run: {
            InitialData data = detail::scenario_data(s, grid);
            Trajectory traj;
            if (s.method == SolverMethod::picard) {
                PicardOptions opt;
                opt.n_modes = s.n_modes;
                opt.dt = s.dt;
                opt.final_time = s.t_final;
                opt.tol = s.picard_tol;
                opt.max_iters = s.max_iters;
                PicardResult r = picard_solve(data, s.kappa, opt);
                traj = std::move(r.trajectory);
                rep << "picard_iterations=" << r.trace.iterations
                    << "\npicard_halvings=" << r.trace.halvings << "\npicard_final_time="
                    << detail::fmt17(r.trace.final_time) << "\npicard_last_residual="
                    << detail::fmt17(r.trace.residuals.empty() ? 0.0 : r.trace.residuals.back())
                    << "\n";
            } else {
                traj = detail::run_solver(s, data, s.kappa);
            }
            detail::write_trajectory_csv(dir, s, traj);
            auto snaps = detail::write_energy_csv(dir, s, traj, data.density);
            InitialNorms n = initial_norms(data);
            rep << "N0=" << detail::fmt17(n.N0) << "\n";
            report_bound(snaps);
            if (detail::oracle_applies(s)) {
                double err = detail::affine_oracle_error(traj, s);
                out.oracle_error = err;
                rep << "oracle_sup_L2_error=" << detail::fmt17(err) << "\n";
            }
            if (s.kappa > 0.0) {
                MonitorReport m = damped_transport_monitor(traj, data.density);
                rep << "monitor_sup_f=" << detail::fmt17(m.sup_f)
                    << "\nmonitor_bound=" << detail::fmt17(std::max(m.f_initial, m.sup_g))
                    << "\nmonitor_satisfied=" << (m.satisfied ? "yes" : "no") << "\n";
            }
            break;
        }
        case ExperimentKind::kappa_sweep: {
            InitialData dataK0 = detail::scenario_data(s, grid);
            std::vector<double> ks = s.kappa_list;
            std::sort(ks.begin(), ks.end(), std::greater<>());
            auto trajs = detail::ordered_pool(ks, s.threads, [&](const double& k) {
                InitialData d = detail::scenario_data(s, grid);
                return detail::run_solver(s, d, k);
            });
            std::ofstream sw(dir / "sweep.csv");
            detail::write_csv_header(sw, s, "kappa,sup_E,L2_diff_to_smallest_kappa,rate_p");
            std::vector<double> supE(ks.size()), diffs(ks.size());
            for (size_t i = 0; i < ks.size(); ++i) {
                double m = 0.0;
                long stride = detail::record_stride(trajs[i]);
                for (size_t l = 0; l < trajs[i].states.size(); l += static_cast<size_t>(stride))
                    m = std::max(m,
                                 energy_snapshot(trajs[i].states[l], dataK0.density, ks[i]).total);
                supE[i] = m;
                diffs[i] = detail::traj_l2_difference(trajs[i], trajs.back());
            }
            // fitted convergence rate from successive pair differences
            double p = 0.0;
            int nfit = 0;
            for (size_t i = 0; i + 2 < ks.size(); ++i) {
                double d1 = detail::traj_l2_difference(trajs[i], trajs[i + 1]);
                double d2 = detail::traj_l2_difference(trajs[i + 1], trajs[i + 2]);
                if (d1 > 0 && d2 > 0 && ks[i + 1] > 0 && ks[i + 2] > 0) {
                    p += std::log(d1 / d2) / std::log(ks[i] / ks[i + 1]);
                    ++nfit;
                }
            }
            if (nfit > 0) p /= nfit;
            for (size_t i = 0; i < ks.size(); ++i)
                sw << detail::fmt17(ks[i]) << ',' << detail::fmt17(supE[i]) << ','
                   << detail::fmt17(diffs[i]) << ',' << detail::fmt17(p) << "\n";
            rep << "sweep_rate_p=" << detail::fmt17(p) << "\nsweep_runs=" << ks.size() << "\n";
            detail::write_trajectory_csv(dir, s, trajs.front());
            auto snaps = detail::write_energy_csv(dir, s, trajs.front(), dataK0.density);
            report_bound(snaps);
            break;
        }
        case ExperimentKind::picard_vs_mol: {
            InitialData data = detail::scenario_data(s, grid);
            PicardOptions popt;
            popt.n_modes = s.n_modes;
            popt.dt = s.dt;
            popt.final_time = s.t_final;
            popt.tol = s.picard_tol;
            popt.max_iters = s.max_iters;
            PicardResult pr = picard_solve(data, s.kappa, popt);
            MolOptions mopt;
            mopt.dt = s.dt;
            mopt.final_time = s.t_final;
            Trajectory mt = direct_mol_solve(data, s.kappa, 2.0, mopt);
            double cross = detail::traj_l2_difference(pr.trajectory, mt);
            rep << "cross_solver_sup_L2=" << detail::fmt17(cross)
                << "\npicard_iterations=" << pr.trace.iterations << "\n";
            if (detail::oracle_applies(s)) {
                rep << "picard_oracle_error="
                    << detail::fmt17(detail::affine_oracle_error(pr.trajectory, s))
                    << "\nmol_oracle_error=" << detail::fmt17(detail::affine_oracle_error(mt, s))
                    << "\n";
            }
            detail::write_trajectory_csv(dir, s, mt);
            auto snaps = detail::write_energy_csv(dir, s, mt, data.density);
            report_bound(snaps);
            break;
        }
        case ExperimentKind::stability_probe: {
            require(s.has_perturbation_eps, ErrorCode::config_invalid,
                    "stability-probe requires 'perturbation_eps'");
            InitialData base = detail::scenario_data(s, grid);
            double eps = s.perturbation_eps;
            double beta = s.beta, delta = s.delta;
            ScalarField u0p = field_from(grid, [beta, delta, eps](const Taylor& x) {
                Taylor b = x * (1.0 - x);
                return beta * x + delta + eps * (16.0 * b * b);
            }, 20);
            InitialData pert = make_initial_data(u0p, base.density, s.kappa, 5);
            std::vector<int> which{0, 1};
            auto trajs = detail::ordered_pool(which, s.threads, [&](const int& i) {
                return detail::run_solver(s, i == 0 ? base : pert, s.kappa);
            });
            double d0 = 0, d1 = 0, d2 = 0;
            size_t n = std::min(trajs[0].states.size(), trajs[1].states.size());
            for (size_t l = 0; l < n; ++l) {
                Eigen::ArrayXd dv = trajs[1].states[l].v - trajs[0].states[l].v;
                Eigen::ArrayXd dvx = trajs[1].states[l].vx - trajs[0].states[l].vx;
                Eigen::ArrayXd dvxx = trajs[1].states[l].vxx - trajs[0].states[l].vxx;
                d0 = std::max(d0, std::sqrt(grid->integrate(dv.square())));
                d1 = std::max(d1, std::sqrt(grid->integrate(dv.square() + dvx.square())));
                d2 = std::max(d2, std::sqrt(grid->integrate(dv.square() + dvx.square() +
                                                            dvxx.square())));
            }
            rep << "sup_delta_v_L2=" << detail::fmt17(d0) << "\nsup_delta_v_H1="
                << detail::fmt17(d1) << "\nsup_delta_v_H2=" << detail::fmt17(d2)
                << "\namplification_L2=" << detail::fmt17(eps > 0 ? d0 / eps : 0.0)
                << "\namplification_H2=" << detail::fmt17(eps > 0 ? d2 / eps : 0.0) << "\n";
            detail::write_trajectory_csv(dir, s, trajs[0]);
            auto snaps = detail::write_energy_csv(dir, s, trajs[0], base.density);
            report_bound(snaps);
            break;
        }
        case ExperimentKind::hardy_suite: {
            GridPtr fine = Grid::refine(*grid);
            std::ofstream hw(dir / "hardy.csv");
            detail::write_csv_header(hw, s, "member,s,ratio_coarse,ratio_fine,rel_change");
            auto family = [](GridPtr g) {
                std::vector<std::pair<std::string, ScalarField>> fam;
                for (int k = 1; k <= 10; ++k)
                    fam.emplace_back("e" + std::to_string(k),
                                     field_from(g, [k](const Taylor& x) {
                                         return std::sqrt(2.0) * sin(static_cast<double>(k) * M_PI * x);
                                     }, 20));
                fam.emplace_back("poly1", field_from(g, [](const Taylor& x) {
                                     return x * (1.0 - x);
                                 }, 20));
                fam.emplace_back("poly2", field_from(g, [](const Taylor& x) {
                                     return x * x * (1.0 - x) + x * (1.0 - x) * (1.0 - x);
                                 }, 20));
                return fam;
            };
            auto coarse_fam = family(grid);
            auto fine_fam = family(fine);
            double worst = 0.0;
            for (size_t i = 0; i < coarse_fam.size(); ++i)
                for (int so = 1; so <= 3; ++so) {
                    double rc = check_hardy_ratio(coarse_fam[i].second, so);
                    double rf = check_hardy_ratio(fine_fam[i].second, so);
                    double rel = std::abs(rf - rc) / std::max(rc, 1e-300);
                    worst = std::max(worst, rel);
                    hw << coarse_fam[i].first << ',' << so << ',' << detail::fmt17(rc) << ','
                       << detail::fmt17(rf) << ',' << detail::fmt17(rel) << "\n";
                }
            rep << "hardy_worst_refinement_change=" << detail::fmt17(worst) << "\n";
            break;
        }
    }

    std::ofstream rf(dir / "report.txt");
    rf << rep.str();
    out.text = rep.str();
    return out;
}

}  // namespace vaclab
