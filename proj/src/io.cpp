#include "qclt/io.hpp"

#include "qclt/clt.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace qclt {

std::string fnv64_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "io", "cannot open file for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), "io", "cannot open file for writing: " + path);
    out << text;
    require(out.good(), "io", "write failed: " + path);
}

void ensure_run_dir(const std::string& dir, bool force) {
    fs::path p(dir);
    if (fs::exists(p)) {
        bool empty = fs::is_directory(p) && fs::is_empty(p);
        if (!empty && !force)
            fail("output-collision",
                 "output directory exists and is not empty (use --force to overwrite): " + dir);
    }
    fs::create_directories(p);
}

std::string trajectory_csv(const HartreeTrajectory& traj) {
    std::ostringstream out;
    out << "t,norm,energy\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        WaveFunction phi(traj.grid, traj.states[i]);
        out << format_g17(traj.times[i]) << ',' << format_g17(phi.norm()) << ','
            << format_g17(hartree_energy(phi, traj.potential, traj.kappa)) << '\n';
    }
    return out.str();
}

namespace {

void append_le_doubles(std::string& out, const VecC& v) {
    // x86-64 doubles are already little-endian; written verbatim
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double re = v[i].real(), im = v[i].imag();
        char buf[16];
        std::memcpy(buf, &re, 8);
        std::memcpy(buf + 8, &im, 8);
        out.append(buf, 16);
    }
}

} // namespace

std::string trajectory_sidecar(const HartreeTrajectory& traj) {
    std::string out;
    out.reserve(traj.states.size() * static_cast<std::size_t>(traj.grid.modes()) * 16);
    for (const VecC& s : traj.states) append_le_doubles(out, s);
    return out;
}

std::string pair_binary(const BogoliubovPair& pair) {
    std::string out;
    std::uint64_t M = static_cast<std::uint64_t>(pair.U.rows());
    char buf[8];
    std::memcpy(buf, &M, 8);
    out.append(buf, 8);
    for (const MatC* m : {&pair.U, &pair.V}) {
        for (Eigen::Index r = 0; r < m->rows(); ++r) {
            VecC row = m->row(r);
            append_le_doubles(out, row);
        }
    }
    return out;
}

std::string reports_csv(const std::vector<MomentReport>& reports) {
    std::ostringstream out;
    out << "N,t,k,exact,gaussian,abs_err,rel_err,sigma2,trace_gap,delta_centering\n";
    for (const MomentReport& rep : reports) {
        for (const MomentRecord& rec : rep.records) {
            out << rep.N << ',' << format_g17(rep.t) << ',' << rec.k << ','
                << format_g17(rec.exact) << ',' << format_g17(rec.gaussian) << ','
                << format_g17(rec.abs_err) << ',' << format_g17(rec.rel_err) << ','
                << format_g17(rep.sigma2) << ',' << format_g17(rep.trace_gap) << ','
                << format_g17(rep.delta_centering) << '\n';
        }
    }
    return out.str();
}

std::string reports_json(const std::vector<MomentReport>& reports) {
    json root = json::array();
    for (const MomentReport& rep : reports) {
        json r;
        r["N"] = rep.N;
        r["t"] = rep.t;
        r["sigma2"] = rep.sigma2;
        r["trace_gap"] = rep.trace_gap;
        r["delta_centering"] = rep.delta_centering;
        r["symplectic_defect"] = rep.symplectic_defect;
        r["pairing_defect"] = rep.pairing_defect;
        r["ttph_residual"] = rep.ttph_residual;
        r["evolution_norm_drift"] = rep.evolution_norm_drift;
        r["config_hash"] = rep.config_hash;
        json recs = json::array();
        for (const MomentRecord& rec : rep.records) {
            recs.push_back({{"k", rec.k},
                            {"exact", rec.exact},
                            {"gaussian", rec.gaussian},
                            {"abs_err", rec.abs_err},
                            {"rel_err", rec.rel_err}});
        }
        r["moments"] = recs;
        root.push_back(r);
    }
    return root.dump(2) + "\n";
}

void write_run_directory(const std::string& dir, bool force, const std::string& config_json,
                         const std::vector<std::pair<std::string, std::string>>& files) {
    ensure_run_dir(dir, force);
    json manifest;
    manifest["tool"] = "qclt";
    manifest["version"] = "1.0.0";
    manifest["config"] = json::parse(config_json);
    manifest["generated_at"] = static_cast<std::int64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
    json list = json::array();
    for (const auto& [name, content] : files) {
        write_text_file((fs::path(dir) / name).string(), content);
        list.push_back({{"name", name},
                        {"bytes", content.size()},
                        {"fnv64", fnv64_hex(content)}});
    }
    manifest["files"] = list;
    write_text_file((fs::path(dir) / "config.json").string(), config_json);
    write_text_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

std::string verify_run_directory(const std::string& dir) {
    fs::path mp = fs::path(dir) / "manifest.json";
    if (!fs::exists(mp)) fail("integrity", "missing manifest.json in " + dir);
    std::string text = read_text_file(mp.string());
    json manifest;
    try {
        manifest = json::parse(text);
    } catch (const std::exception& e) {
        fail("integrity", std::string("corrupt manifest: ") + e.what());
    }
    for (const json& f : manifest.at("files")) {
        std::string name = f.at("name").get<std::string>();
        std::string content = read_text_file((fs::path(dir) / name).string());
        if (fnv64_hex(content) != f.at("fnv64").get<std::string>())
            fail("integrity", "hash mismatch for file: " + name);
    }
    return text;
}

} // namespace qclt
