#include "qclt/cli.hpp"

#include "qclt/clt.hpp"
#include "qclt/combinatorics.hpp"
#include "qclt/io.hpp"
#include "qclt/oracles.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <random>
#include <sstream>

using json = nlohmann::json;

namespace qclt {

namespace {

struct CheckRow {
    std::string name;
    bool pass;
    double worst;
    double threshold;
};

int print_table(const std::string& title, const std::vector<CheckRow>& rows) {
    bool all = true;
    std::cout << title << '\n';
    for (const CheckRow& r : rows) {
        all = all && r.pass;
        std::printf("  %-38s %s  worst=%.3e  threshold=%.1e\n", r.name.c_str(),
                    r.pass ? "PASS" : "FAIL", r.worst, r.threshold);
    }
    std::cout << (all ? "all checks passed" : "CHECKS FAILED") << '\n';
    return all ? 0 : 1;
}

int cmd_hartree(const std::string& config_path, const std::string& out_dir, bool force) {
    RunConfig cfg = load_config(config_path);
    Grid g = make_grid(cfg);
    PairPotential V = make_potential(cfg, g);
    WaveFunction phi0 = make_initial_state(cfg, g);
    HartreeTrajectory traj =
        hartree_evolve(phi0, cfg.horizon, cfg.dt, V, cfg.kappa, cfg.sample_stride);
    write_run_directory(out_dir, force, config_to_json_text(cfg),
                        {{"trajectory.csv", trajectory_csv(traj)},
                         {"states.bin", trajectory_sidecar(traj)}});
    std::cout << "hartree run written to " << out_dir << " (" << traj.times.size()
              << " samples)\n";
    return 0;
}

int cmd_bogoliubov(const std::string& config_path, const std::string& out_dir, bool force) {
    RunConfig cfg = load_config(config_path);
    Grid g = make_grid(cfg);
    PairPotential V = make_potential(cfg, g);
    MatC O = make_observable(cfg, g);
    WaveFunction phi0 = make_initial_state(cfg, g);
    HartreeTrajectory traj = hartree_evolve(phi0, cfg.horizon, cfg.dt, V, cfg.kappa, 1);
    BogoliubovPair theta = cfg.horizon > 0.0
                               ? propagate_theta(traj, cfg.dt, cfg.tolerances.symplectic_ceiling)
                               : identity_pair(g);
    double sigma2 = variance(theta, O, traj.states.back(), traj.states.front());

    json summary;
    summary["t"] = cfg.horizon;
    summary["symplectic_defect"] = theta.symplectic_defect();
    summary["pairing_defect"] = theta.pairing_defect();
    summary["ttph_residual"] = check_ttph(theta, traj.states.back(), traj.states.front());
    summary["observable"] = cfg.observable.kind;
    summary["sigma2"] = sigma2;
    write_run_directory(out_dir, force, config_to_json_text(cfg),
                        {{"theta.bin", pair_binary(theta)},
                         {"summary.json", summary.dump(2) + "\n"}});
    std::cout << "bogoliubov run written to " << out_dir << " (sigma2=" << format_g17(sigma2)
              << ")\n";
    return 0;
}

int cmd_clt(const std::string& config_path, const std::string& out_dir, bool force) {
    RunConfig cfg = load_config(config_path);
    std::vector<MomentReport> reports = clt_run(cfg);
    write_run_directory(out_dir, force, config_to_json_text(cfg),
                        {{"moments.csv", reports_csv(reports)},
                         {"moments.json", reports_json(reports)}});
    std::cout << reports_csv(reports);
    std::cout << "clt run written to " << out_dir << '\n';
    return 0;
}

int cmd_combinatorics_selftest(std::uint64_t seed, int trials) {
    std::vector<CheckRow> rows;

    // direct vs recursive, exact agreement
    bool agree = true;
    for (long N : {2L, 3L, 5L, 10L, 50L, 200L, 1000L}) {
        int lmax = static_cast<int>(std::min<long>(20, N));
        combi::XiCoefficients a = combi::xi_direct(N, lmax);
        combi::XiCoefficients b = combi::xi_recursive(N, lmax);
        for (int l = 0; l <= lmax; ++l)
            agree = agree && (a.scaled[static_cast<std::size_t>(l)] ==
                              b.scaled[static_cast<std::size_t>(l)]);
    }
    rows.push_back({"xi direct vs recursive (exact)", agree, agree ? 0.0 : 1.0, 0.0});

    // Limit approach: odd coefficients decay like N^(-1/2); even deviations
    // vanish to one order better, O(1/N) (identically zero for 2m <= 2).
    double worst_odd_dev = 0.0;
    double worst_even_dev = 0.0;
    for (int m = 1; m <= 4; ++m) {
        std::vector<double> lodd, leven;
        for (long N : {100L, 1000L, 10000L}) {
            combi::XiCoefficients x = combi::xi_direct(N, 2 * m + 1);
            lodd.push_back(std::log10(std::abs(x.value(2 * m + 1))));
            if (m >= 2) {
                mpq_class diff = x.exact_even(m) - combi::xi_limit_exact(m);
                leven.push_back(std::log10(std::abs(diff.get_d())));
            }
        }
        worst_odd_dev = std::max(worst_odd_dev, std::abs((lodd[2] - lodd[0]) / 2.0 + 0.5));
        if (m >= 2)
            worst_even_dev =
                std::max(worst_even_dev, std::abs((leven[2] - leven[0]) / 2.0 + 1.0));
    }
    rows.push_back({"xi odd-coefficient decay slope -1/2", worst_odd_dev <= 0.1, worst_odd_dev, 0.1});
    rows.push_back({"xi even-coefficient deviation slope -1", worst_even_dev <= 0.1, worst_even_dev, 0.1});

    // field-power expansion against the exact single-mode brute force
    bool expansion_exact = true;
    for (int ell = 0; ell <= 5; ++ell) {
        mpq_class s(7, 3);
        std::vector<mpq_class> brute = oracle::field_power_brute(ell, s);
        combi::FieldPowerExpansion e = combi::expand_field_power(ell);
        for (int m = 0; m <= ell; ++m) {
            mpq_class expect = e.coeff[static_cast<std::size_t>(m)];
            for (int p = 0; p < ell - m; ++p) expect *= s;
            expansion_exact = expansion_exact && (expect == brute[static_cast<std::size_t>(m)]);
        }
    }
    rows.push_back({"field power expansion (exact)", expansion_exact,
                    expansion_exact ? 0.0 : 1.0, 0.0});

    // normal-ordering summation identity
    double worst_no = 0.0;
    for (int ell = 1; ell <= 3; ++ell)
        worst_no = std::max(worst_no, combi::normal_order_check(ell, trials, seed + ell));
    rows.push_back({"normal ordering identity", worst_no <= 1e-10, worst_no, 1e-10});

    // pair-partition prefactor
    bool wick_ok = true;
    for (int k = 0; k <= 10; ++k)
        wick_ok = wick_ok && (combi::wick_count(k) == oracle::count_pair_partitions(k));
    rows.push_back({"wick counts vs enumeration", wick_ok, wick_ok ? 0.0 : 1.0, 0.0});

    return print_table("combinatorics self-test", rows);
}

int cmd_fock_selftest(std::uint64_t seed) {
    std::vector<CheckRow> rows;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    // CCR on the guarded subspace, matrix route
    {
        auto basis = std::make_shared<fock::TruncatedBasis>(3, 5);
        double worst = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                fock::SparseC ai = fock::annihilate_matrix(i, *basis);
                fock::SparseC cj = fock::create_matrix(j, *basis);
                MatC comm = MatC(ai) * MatC(cj) - MatC(cj) * MatC(ai);
                for (Eigen::Index c = 0; c < basis->size(); ++c) {
                    if (basis->total(c) >= basis->nmax()) continue; // guarded subspace
                    for (Eigen::Index r = 0; r < basis->size(); ++r) {
                        Complex expect = (r == c && i == j) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
                        worst = std::max(worst, std::abs(comm(r, c) - expect));
                    }
                }
            }
        }
        rows.push_back({"CCR on guarded subspace", worst <= 1e-12, worst, 1e-12});
    }

    // Weyl shift relation
    {
        auto basis = std::make_shared<fock::TruncatedBasis>(2, 16);
        VecC f(2), gvec(2);
        for (int i = 0; i < 2; ++i) {
            f[i] = Complex(unit(rng), unit(rng));
            gvec[i] = Complex(unit(rng), unit(rng));
        }
        fock::FockVector psi = vacuum(basis);
        psi = fock::apply_adag(gvec, psi); // a 1-particle state, far below nmax
        psi.coeff.normalize();
        fock::FockVector lhs = fock::weyl_apply(-f, fock::apply_a(gvec, fock::weyl_apply(f, psi)));
        fock::FockVector rhs = fock::apply_a(gvec, psi);
        rhs.coeff += gvec.dot(f) * psi.coeff;
        double resid = (lhs.coeff - rhs.coeff).norm();
        rows.push_back({"Weyl shift relation", resid <= 1e-6, resid, 1e-6});
    }

    // coherent-state Poisson statistics
    {
        VecC f(1);
        f[0] = 1.0;
        auto [mean, var] = fock::coherent_number_stats(f, 30);
        double worst = std::max(std::abs(mean - 1.0), std::abs(var - 1.0));
        rows.push_back({"coherent Poisson stats", worst <= 1e-8, worst, 1e-8});
    }

    // a(f) bound by the number operator
    {
        auto basis = std::make_shared<fock::TruncatedBasis>(2, 8);
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            VecC f(2);
            f[0] = Complex(unit(rng), unit(rng));
            f[1] = Complex(unit(rng), unit(rng));
            fock::FockVector psi = vacuum(basis);
            psi.coeff.setZero();
            for (Eigen::Index i = 0; i < psi.coeff.size(); ++i)
                psi.coeff[i] = Complex(unit(rng), unit(rng));
            psi.coeff.normalize();
            double lhs = fock::apply_a(f, psi).coeff.norm();
            double rhs = 0.0;
            for (int n = 0; n <= basis->nmax(); ++n) rhs += n * psi.sector_mass(n);
            rhs = f.norm() * std::sqrt(rhs);
            worst = std::max(worst, lhs - rhs * (1.0 + 1e-13));
        }
        rows.push_back({"a(f) number bound", worst <= 0.0, worst, 0.0});
    }

    // xi components against the exact coefficients
    {
        double worst = 0.0;
        VecC c(2);
        c[0] = Complex(0.6, 0.3);
        c[1] = Complex(0.2, -0.1);
        c.normalize();
        for (int N : {2, 4, 6}) {
            fock::FockVector xi = fock::xi_state(c, N, 8 * N, 7 * N);
            combi::XiCoefficients ref = combi::xi_direct(N, std::min(6, N));
            for (int l = 0; l <= std::min(6, N); ++l) {
                fock::FockVector mono = fock::monomial_state(c, l, xi.basis);
                Complex got = mono.coeff.dot(xi.coeff) / std::tgamma(l + 1.0);
                worst = std::max(worst, std::abs(got - Complex(ref.value(l), 0.0)));
            }
        }
        rows.push_back({"xi_state vs exact expansion coefficients", worst <= 1e-8, worst, 1e-8});
    }

    return print_table("fock self-test", rows);
}

int cmd_report(const std::string& run_dir) {
    std::cout << emit_report(run_dir);
    return 0;
}

} // namespace

std::string emit_report(const std::string& run_dir) {
    std::string manifest_text = verify_run_directory(run_dir);
    json manifest = json::parse(manifest_text);
    std::ostringstream out;
    out << "run directory: " << run_dir << '\n';
    out << "tool: " << manifest.at("tool").get<std::string>() << " "
        << manifest.at("version").get<std::string>() << '\n';
    out << "files verified: " << manifest.at("files").size() << '\n';

    for (const json& f : manifest.at("files")) {
        std::string name = f.at("name").get<std::string>();
        if (name != "moments.json") continue;
        json reports = json::parse(read_text_file(run_dir + "/" + name));
        for (const json& rep : reports) {
            out << "N=" << rep.at("N").get<int>() << "  t=" << format_g17(rep.at("t").get<double>())
                << "  sigma2=" << format_g17(rep.at("sigma2").get<double>())
                << "  trace_gap=" << format_g17(rep.at("trace_gap").get<double>()) << '\n';
            for (const json& rec : rep.at("moments")) {
                out << "  k=" << rec.at("k").get<int>() << "  exact="
                    << format_g17(rec.at("exact").get<double>())
                    << "  gaussian=" << format_g17(rec.at("gaussian").get<double>())
                    << "  abs_err=" << format_g17(rec.at("abs_err").get<double>()) << '\n';
            }
        }
        // error trend across the sweep, per k
        if (!reports.empty()) {
            int kmax = static_cast<int>(reports.front().at("moments").size());
            for (int k = 1; k <= kmax; ++k) {
                out << "trend k=" << k << ":";
                for (const json& rep : reports)
                    out << ' '
                        << format_g17(rep.at("moments")[static_cast<std::size_t>(k - 1)]
                                          .at("abs_err")
                                          .get<double>());
                out << '\n';
            }
        }
    }
    for (const json& f : manifest.at("files")) {
        std::string name = f.at("name").get<std::string>();
        if (name != "trajectory.csv") continue;
        std::string csv = read_text_file(run_dir + "/" + name);
        std::size_t rows = 0;
        for (char c : csv)
            if (c == '\n') ++rows;
        std::size_t last_start = csv.rfind('\n', csv.size() - 2);
        out << "trajectory: " << (rows - 1) << " samples, final row "
            << csv.substr(last_start + 1);
    }
    for (const json& f : manifest.at("files")) {
        std::string name = f.at("name").get<std::string>();
        if (name != "summary.json") continue;
        json s = json::parse(read_text_file(run_dir + "/" + name));
        out << "bogoliubov summary: sigma2=" << format_g17(s.at("sigma2").get<double>())
            << "  symplectic_defect=" << format_g17(s.at("symplectic_defect").get<double>())
            << "  ttph_residual=" << format_g17(s.at("ttph_residual").get<double>()) << '\n';
    }
    return out.str();
}

int run_subcommand(const std::vector<std::string>& argv) {
    CLI::App app{"qclt: mean-field bosonic dynamics and its central limit theorem"};
    app.require_subcommand(1);

    std::string config_path, out_dir, run_dir;
    bool force = false;
    std::uint64_t seed = 12345;
    int trials = 100;

    CLI::App* hartree = app.add_subcommand("hartree", "integrate the Hartree equation");
    hartree->add_option("--config", config_path, "run configuration file")->required();
    hartree->add_option("--out", out_dir, "output run directory")->required();
    hartree->add_flag("--force", force, "overwrite an existing run directory");

    CLI::App* bogo = app.add_subcommand("bogoliubov", "propagate the Bogoliubov pair");
    bogo->add_option("--config", config_path, "run configuration file")->required();
    bogo->add_option("--out", out_dir, "output run directory")->required();
    bogo->add_flag("--force", force, "overwrite an existing run directory");

    CLI::App* clt = app.add_subcommand("clt", "run the end-to-end moment comparison");
    clt->add_option("--config", config_path, "run configuration file")->required();
    clt->add_option("--out", out_dir, "output run directory")->required();
    clt->add_flag("--force", force, "overwrite an existing run directory");

    CLI::App* fockst = app.add_subcommand("fock-selftest", "operator-algebra self checks");
    fockst->add_option("--seed", seed, "random seed");

    CLI::App* combist =
        app.add_subcommand("combinatorics-selftest", "exact identity self checks");
    combist->add_option("--seed", seed, "random seed");
    combist->add_option("--trials", trials, "trials per randomized identity");

    CLI::App* report = app.add_subcommand("report", "verify and summarize a run directory");
    report->add_option("--run", run_dir, "run directory")->required();

    std::vector<std::string> args = argv;
    std::reverse(args.begin(), args.end()); // CLI11 parses reversed vectors
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (hartree->parsed()) return cmd_hartree(config_path, out_dir, force);
        if (bogo->parsed()) return cmd_bogoliubov(config_path, out_dir, force);
        if (clt->parsed()) return cmd_clt(config_path, out_dir, force);
        if (fockst->parsed()) return cmd_fock_selftest(seed);
        if (combist->parsed()) return cmd_combinatorics_selftest(seed, trials);
        if (report->parsed()) return cmd_report(run_dir);
    } catch (const Error& e) {
        json err;
        err["error"] = {{"kind", e.kind()}, {"message", e.what()}};
        std::cerr << err.dump() << '\n';
        return 3;
    } catch (const std::exception& e) {
        json err;
        err["error"] = {{"kind", "internal"}, {"message", e.what()}};
        std::cerr << err.dump() << '\n';
        return 4;
    }
    return 2;
}

} // namespace qclt
