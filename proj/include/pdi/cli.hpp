#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdi/stats.hpp"

// CSV ingestion, kernel spec files / presets, and JSON report assembly.
// Exit-code contract: 0 ok, 1 usage, 2 capacity, 3 data error.

namespace pdi::cli {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ColumnBlocks {
    std::vector<int> widths;
};

inline ColumnBlocks parse_blocks(const std::string& s) {
    ColumnBlocks b;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            const int w = std::stoi(tok);
            if (w < 1) throw usage_error("--blocks entries must be positive");
            b.widths.push_back(w);
        } catch (const std::invalid_argument&) {
            throw usage_error("--blocks: cannot parse '" + tok + "'");
        }
    }
    if (b.widths.empty()) throw usage_error("--blocks: empty");
    return b;
}

// UTF-8 CSV, header row, numeric body, no missing values.
inline Dataset load_csv(const std::string& path, const ColumnBlocks& blocks) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw data_error(path + ": missing header row");
    int total = 0;
    for (int w : blocks.widths) total += w;

    Dataset d;
    d.sig.n = static_cast<int>(blocks.widths.size());
    d.sig.dims = blocks.widths;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            ++col;
            try {
                std::size_t pos = 0;
                const double v = std::stod(cell, &pos);
                while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
                if (pos != cell.size()) throw std::invalid_argument(cell);
                if (!std::isfinite(v)) {
                    throw data_error(path + ": non-finite value at row " + std::to_string(row) +
                                     ", column " + std::to_string(col));
                }
                vals.push_back(v);
            } catch (const std::invalid_argument&) {
                throw data_error(path + ": parse error at row " + std::to_string(row) + ", column " +
                                 std::to_string(col));
            }
        }
        if (static_cast<int>(vals.size()) != total) {
            throw data_error(path + ": row " + std::to_string(row) + " has " +
                             std::to_string(vals.size()) + " columns, blocks declare " +
                             std::to_string(total));
        }
        ProductPoint p;
        int off = 0;
        for (int w : blocks.widths) {
            Eigen::VectorXd v(w);
            for (int i = 0; i < w; ++i) v[i] = vals[static_cast<std::size_t>(off + i)];
            p.comps.push_back(std::move(v));
            off += w;
        }
        d.samples.push_back(std::move(p));
    }
    if (d.samples.empty()) throw data_error(path + ": no data rows");
    return d;
}

// -------------------------------------------------------------------------
// Kernel selection: `preset:<name>` or a key=value spec file
// -------------------------------------------------------------------------
inline std::vector<std::pair<std::string, std::string>> parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open kernel spec '" + path + "'");
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw data_error("kernel spec: bad line '" + t + "'");
        kv.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return kv;
}

inline ComponentCND parse_gamma(const std::string& s) {
    if (s == "squared_euclidean") return ComponentCND::squared_euclidean();
    const std::string prefix = "euclidean_power:";
    if (s.rfind(prefix, 0) == 0) return ComponentCND::euclidean_power(std::stod(s.substr(prefix.size())));
    throw usage_error("unknown gamma '" + s + "'");
}

inline PDIKernelSpec kernel_from_file(const std::string& path, const SpaceSignature& sig) {
    auto kv = parse_kv_file(path);
    auto get = [&](const std::string& key, const std::string& fallback = "") {
        for (const auto& [k, v] : kv) {
            if (k == key) return v;
        }
        if (fallback.empty()) throw data_error("kernel spec: missing key '" + key + "'");
        return fallback;
    };
    const std::string kind = get("kind");
    std::vector<ComponentCND> gammas;
    const std::string gspec = get("gamma", "euclidean_power:1");
    for (int i = 0; i < sig.n; ++i) gammas.push_back(parse_gamma(gspec));

    if (kind == "sum_form") {
        const int ell = std::stoi(get("ell"));
        const std::string psi = get("psi");
        CMFunctionSpec cm;
        if (psi == "power") {
            cm = CMFunctionSpec::power(std::stod(get("a")), ell);
        } else if (psi == "log_power") {
            cm = CMFunctionSpec::log_power(ell);
        } else if (psi == "exponential") {
            cm = CMFunctionSpec::exponential(std::stod(get("r", "1")), ell);
        } else if (psi == "shifted_power") {
            cm = CMFunctionSpec::shifted_power(std::stod(get("c")), std::stod(get("a")), ell);
        } else {
            throw data_error("kernel spec: unknown psi '" + psi + "'");
        }
        return PDIKernelSpec::sum_form(sig, cm, gammas, "file:" + kind + "/" + psi);
    }
    if (kind == "bernstein") {
        const int k = std::stoi(get("k", std::to_string(sig.n)));
        // atoms = r1 r2 ... rn : w ; r1 ... rn : w ; ...
        std::vector<BernsteinSpecK::ProductAtom> atoms;
        std::stringstream ss(get("atoms"));
        std::string atom;
        while (std::getline(ss, atom, ';')) {
            const auto colon = atom.find(':');
            if (colon == std::string::npos) throw data_error("kernel spec: atom needs 'r... : w'");
            std::stringstream rs(atom.substr(0, colon));
            Eigen::VectorXd r(sig.n);
            for (int i = 0; i < sig.n; ++i) {
                if (!(rs >> r[i])) throw data_error("kernel spec: atom r has wrong arity");
            }
            atoms.push_back({r, std::stod(atom.substr(colon + 1))});
        }
        BernsteinSpecK g = (k == sig.n) ? BernsteinSpecK::order_n(sig.n, atoms)
                                        : BernsteinSpecK::order_k(sig.n, k, atoms);
        return PDIKernelSpec::bernstein(sig, g, gammas, "file:bernstein");
    }
    throw data_error("kernel spec: unknown kind '" + kind + "'");
}

inline PDIKernelSpec resolve_kernel(const std::string& arg, const SpaceSignature& sig) {
    const std::string preset = "preset:";
    if (arg.rfind(preset, 0) != 0) return kernel_from_file(arg, sig);
    const std::string name = arg.substr(preset.size());
    if (name == "dcov") return dcov_kernel(sig);
    if (name == "dhsic-gauss") return dhsic_gauss_kernel(sig);
    const std::string lp = "lancaster-pow:";
    if (name.rfind(lp, 0) == 0) {
        const double a = std::stod(name.substr(lp.size()));
        const int ell = static_cast<int>(std::ceil(a));
        return PDIKernelSpec::sum_form(sig, CMFunctionSpec::power(a, ell), default_gammas(sig.n),
                                       name);
    }
    const std::string ba = "bernstein-atom:";
    if (name.rfind(ba, 0) == 0) {
        const double r = std::stod(name.substr(ba.size()));
        return PDIKernelSpec::bernstein(
            sig, BernsteinSpecK::order_n(sig.n, {{Eigen::VectorXd::Constant(sig.n, r), 1.0}}),
            default_gammas(sig.n), name);
    }
    throw usage_error("unknown kernel preset '" + name + "'");
}

// -------------------------------------------------------------------------
// Reports
// -------------------------------------------------------------------------
inline nlohmann::json report_json(const TestReport& rep) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["statistic"] = rep.statistic;
    if (rep.p_value) j["p_value"] = *rep.p_value;
    j["N"] = rep.N;
    j["n"] = rep.n;
    j["k"] = rep.k;
    j["B"] = rep.B;
    j["seed"] = rep.seed;
    j["engine"] = rep.engine;
    j["kernel"] = rep.kernel_name;
    j["interaction"] = rep.interaction;
    j["null"] = rep.null_model;
    j["elapsed_ms"] = rep.elapsed_ms;
    return j;
}

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace pdi::cli
