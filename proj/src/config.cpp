#include "qclt/config.hpp"

#include "qclt/io.hpp"

#include <json.hpp>

#include <cmath>

using json = nlohmann::json;

namespace qclt {

void RunConfig::validate() const {
    require(grid_dim >= 1 && grid_points >= 1 && grid_length > 0.0, "config",
            "invalid grid parameters");
    require(horizon >= 0.0 && dt > 0.0, "config", "invalid time parameters");
    require(sample_stride >= 1, "config", "sample stride must be >= 1");
    require(!sweep.empty(), "config", "sweep list must be nonempty");
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        require(sweep[i] >= 1, "config", "sweep entries must be positive");
        if (i) require(sweep[i] > sweep[i - 1], "config", "sweep list must be increasing");
    }
    require(k_max >= 1 && k_max <= 8, "config", "k_max must lie in 1..8");
    require(centering == "hartree" || centering == "reduced", "config",
            "centering must be 'hartree' or 'reduced'");
    require(tolerances.mass > 0.0 && tolerances.energy > 0.0 &&
                tolerances.symplectic_ceiling > 0.0 && tolerances.krylov > 0.0 &&
                tolerances.hermiticity > 0.0,
            "config", "all tolerances must be positive");
    require(truncation_factor >= 1, "config", "truncation factor must be >= 1");
    require(!output_dir.empty(), "config", "output directory must be set");
}

namespace {

json pairs_to_json(const std::vector<std::vector<double>>& rows) {
    json out = json::array();
    for (const auto& r : rows) out.push_back(r);
    return out;
}

std::vector<std::vector<double>> pairs_from_json(const json& j) {
    std::vector<std::vector<double>> out;
    for (const json& r : j) out.push_back(r.get<std::vector<double>>());
    return out;
}

} // namespace

std::string config_to_json_text(const RunConfig& cfg) {
    json j;
    j["scenario"] = cfg.scenario;
    j["grid"] = {{"dim", cfg.grid_dim}, {"points", cfg.grid_points}, {"length", cfg.grid_length}};
    json pot;
    pot["kind"] = cfg.potential.kind;
    pot["amplitude"] = cfg.potential.amplitude;
    pot["width"] = cfg.potential.width;
    pot["softening"] = cfg.potential.softening;
    pot["radius"] = cfg.potential.radius;
    if (!cfg.potential.table.empty()) pot["table"] = cfg.potential.table;
    j["potential"] = pot;
    j["kappa"] = cfg.kappa;
    j["time"] = {{"horizon", cfg.horizon}, {"dt", cfg.dt}, {"sample_stride", cfg.sample_stride}};
    j["sweep"] = cfg.sweep;
    json obs;
    obs["kind"] = cfg.observable.kind;
    obs["harmonic"] = cfg.observable.harmonic;
    obs["center"] = cfg.observable.center;
    obs["width"] = cfg.observable.width;
    if (!cfg.observable.matrix.empty()) obs["matrix"] = pairs_to_json(cfg.observable.matrix);
    j["observable"] = obs;
    json init;
    init["kind"] = cfg.initial_state.kind;
    init["center"] = cfg.initial_state.center;
    init["width"] = cfg.initial_state.width;
    if (!cfg.initial_state.values.empty()) init["values"] = pairs_to_json(cfg.initial_state.values);
    j["initial_state"] = init;
    j["k_max"] = cfg.k_max;
    j["centering"] = cfg.centering;
    j["tolerances"] = {{"mass", cfg.tolerances.mass},
                       {"energy", cfg.tolerances.energy},
                       {"symplectic_ceiling", cfg.tolerances.symplectic_ceiling},
                       {"krylov", cfg.tolerances.krylov},
                       {"hermiticity", cfg.tolerances.hermiticity}};
    j["truncation_factor"] = cfg.truncation_factor;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    return j.dump(2) + "\n";
}

RunConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail("config", std::string("config parse error: ") + e.what());
    }
    RunConfig cfg;
    try {
        cfg.scenario = j.at("scenario").get<std::string>();
        cfg.grid_dim = j.at("grid").at("dim").get<int>();
        cfg.grid_points = j.at("grid").at("points").get<int>();
        cfg.grid_length = j.at("grid").at("length").get<double>();
        const json& pot = j.at("potential");
        cfg.potential.kind = pot.at("kind").get<std::string>();
        cfg.potential.amplitude = pot.at("amplitude").get<double>();
        cfg.potential.width = pot.at("width").get<double>();
        cfg.potential.softening = pot.at("softening").get<double>();
        cfg.potential.radius = pot.at("radius").get<double>();
        if (pot.contains("table")) cfg.potential.table = pot.at("table").get<std::vector<double>>();
        cfg.kappa = j.at("kappa").get<double>();
        cfg.horizon = j.at("time").at("horizon").get<double>();
        cfg.dt = j.at("time").at("dt").get<double>();
        cfg.sample_stride = j.at("time").at("sample_stride").get<int>();
        cfg.sweep = j.at("sweep").get<std::vector<int>>();
        const json& obs = j.at("observable");
        cfg.observable.kind = obs.at("kind").get<std::string>();
        cfg.observable.harmonic = obs.at("harmonic").get<int>();
        cfg.observable.center = obs.at("center").get<double>();
        cfg.observable.width = obs.at("width").get<double>();
        if (obs.contains("matrix")) cfg.observable.matrix = pairs_from_json(obs.at("matrix"));
        const json& init = j.at("initial_state");
        cfg.initial_state.kind = init.at("kind").get<std::string>();
        cfg.initial_state.center = init.at("center").get<double>();
        cfg.initial_state.width = init.at("width").get<double>();
        if (init.contains("values")) cfg.initial_state.values = pairs_from_json(init.at("values"));
        cfg.k_max = j.at("k_max").get<int>();
        cfg.centering = j.at("centering").get<std::string>();
        const json& tol = j.at("tolerances");
        cfg.tolerances.mass = tol.at("mass").get<double>();
        cfg.tolerances.energy = tol.at("energy").get<double>();
        cfg.tolerances.symplectic_ceiling = tol.at("symplectic_ceiling").get<double>();
        cfg.tolerances.krylov = tol.at("krylov").get<double>();
        cfg.tolerances.hermiticity = tol.at("hermiticity").get<double>();
        cfg.truncation_factor = j.at("truncation_factor").get<int>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.output_dir = j.at("output_dir").get<std::string>();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail("config", std::string("config field error: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    return config_from_json_text(read_text_file(path));
}

RunConfig standard_config() {
    RunConfig cfg;
    cfg.scenario = "standard";
    cfg.grid_dim = 1;
    cfg.grid_points = 4;
    cfg.grid_length = 4.0;
    cfg.potential.kind = "gaussian";
    cfg.potential.amplitude = 0.75;
    cfg.potential.width = 1.0;
    cfg.kappa = 1.0;
    cfg.horizon = 0.5;
    cfg.dt = 1e-3;
    cfg.sample_stride = 1;
    cfg.sweep = {4, 8, 12};
    cfg.observable.kind = "cosine";
    cfg.observable.harmonic = 1;
    cfg.initial_state.kind = "gaussian-bump";
    cfg.initial_state.center = 2.0;
    cfg.initial_state.width = 1.0;
    cfg.k_max = 4;
    cfg.output_dir = "runs/standard";
    return cfg;
}

Grid make_grid(const RunConfig& cfg) {
    return Grid(cfg.grid_dim, cfg.grid_points, cfg.grid_length);
}

PairPotential make_potential(const RunConfig& cfg, const Grid& g) {
    const PotentialSpec& p = cfg.potential;
    if (p.kind == "gaussian") return potential_gaussian(g, p.amplitude, p.width);
    if (p.kind == "soft-coulomb") return potential_soft_coulomb(g, p.amplitude, p.softening);
    if (p.kind == "box") return potential_box(g, p.amplitude, p.radius);
    if (p.kind == "custom-table") {
        require(static_cast<Eigen::Index>(p.table.size()) == g.modes(), "config",
                "custom potential table must have one entry per lattice site");
        VecR vals(g.modes());
        for (Eigen::Index i = 0; i < vals.size(); ++i)
            vals[i] = p.table[static_cast<std::size_t>(i)];
        return potential_table(g, std::move(vals));
    }
    fail("config", "unknown potential kind: " + p.kind);
}

MatC make_observable(const RunConfig& cfg, const Grid& g) {
    const ObservableSpec& o = cfg.observable;
    const Eigen::Index M = g.modes();
    if (o.kind == "cosine") {
        MatC O = MatC::Zero(M, M);
        std::vector<int> mi(static_cast<std::size_t>(g.dim));
        for (Eigen::Index i = 0; i < M; ++i) {
            g.unflatten(i, mi.data());
            double x = mi[0] * g.spacing();
            O(i, i) = std::cos(2.0 * kPi * o.harmonic * x / g.length);
        }
        return O;
    }
    if (o.kind == "gaussian-window") {
        MatC O = MatC::Zero(M, M);
        std::vector<int> mi(static_cast<std::size_t>(g.dim));
        for (Eigen::Index i = 0; i < M; ++i) {
            g.unflatten(i, mi.data());
            double x = mi[0] * g.spacing();
            double d = std::abs(x - o.center);
            d = std::min(d, g.length - d);
            O(i, i) = std::exp(-0.5 * d * d / (o.width * o.width));
        }
        return O;
    }
    if (o.kind == "custom") {
        require(static_cast<Eigen::Index>(o.matrix.size()) == M, "config",
                "custom observable needs M rows");
        MatC O(M, M);
        for (Eigen::Index r = 0; r < M; ++r) {
            const auto& row = o.matrix[static_cast<std::size_t>(r)];
            require(static_cast<Eigen::Index>(row.size()) == 2 * M, "config",
                    "custom observable rows hold re,im pairs");
            for (Eigen::Index c = 0; c < M; ++c)
                O(r, c) = Complex(row[static_cast<std::size_t>(2 * c)],
                                  row[static_cast<std::size_t>(2 * c + 1)]);
        }
        require((O - O.adjoint()).norm() <= 1e-10 * (1.0 + O.norm()), "config",
                "custom observable must be Hermitian");
        return O;
    }
    fail("config", "unknown observable kind: " + o.kind);
}

WaveFunction make_initial_state(const RunConfig& cfg, const Grid& g) {
    const InitialStateSpec& s = cfg.initial_state;
    const Eigen::Index M = g.modes();
    VecC v(M);
    if (s.kind == "constant") {
        v.setOnes();
    } else if (s.kind == "gaussian-bump") {
        std::vector<int> mi(static_cast<std::size_t>(g.dim));
        for (Eigen::Index i = 0; i < M; ++i) {
            g.unflatten(i, mi.data());
            double r2 = 0.0;
            for (int a = 0; a < g.dim; ++a) {
                double x = mi[static_cast<std::size_t>(a)] * g.spacing();
                double d = std::abs(x - s.center);
                d = std::min(d, g.length - d);
                r2 += d * d;
            }
            v[i] = std::exp(-0.5 * r2 / (s.width * s.width));
        }
    } else if (s.kind == "custom") {
        require(static_cast<Eigen::Index>(s.values.size()) == M, "config",
                "custom initial state needs M rows of [re, im]");
        for (Eigen::Index i = 0; i < M; ++i) {
            const auto& row = s.values[static_cast<std::size_t>(i)];
            require(row.size() == 2, "config", "custom initial state rows are [re, im]");
            v[i] = Complex(row[0], row[1]);
        }
    } else {
        fail("config", "unknown initial state kind: " + s.kind);
    }
    WaveFunction phi(g, std::move(v));
    phi.normalize();
    return phi;
}

} // namespace qclt
