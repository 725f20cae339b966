#include "nehari/run.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "nehari/fibering.hpp"
#include "nehari/rng.hpp"

namespace nehari {

namespace {

using Json = nlohmann::ordered_json;

Json estimate_to_json(const Lambda0Estimate& est) {
    Json j;
    j["kind"] = "sampled desk-scale estimate (not proof-grade)";
    j["ok"] = est.ok;
    if (!est.ok) j["failure_reason"] = est.failure_reason;
    j["S_p"] = est.S_p;
    j["S_q1"] = est.S_q1;
    j["S_r1"] = est.S_r1;
    j["M"] = est.M;
    j["h_sup"] = est.h_sup;
    j["b_plus_sup"] = est.b_plus_sup;
    j["delta"] = est.delta;
    j["c"] = est.c_const;
    j["lambda0"] = est.lambda0;
    return j;
}

Json branch_to_json(const BranchResult& br) {
    Json j;
    j["status"] = to_string(br.status);
    if (!br.message.empty()) j["message"] = br.message;
    j["energy"] = br.energy;
    j["residual"] = br.residual;
    j["nehari_residual"] = br.nehari_residual;
    j["phi_second_at_one"] = br.phi_second_at_one;
    j["negative_part_norm"] = br.negative_part_norm;
    j["iterations"] = br.iterations;
    return j;
}

Json config_echo(const RunConfig& cfg, double resolved_lambda) {
    Json j;
    j["seed"] = cfg.seed;
    j["dim"] = cfg.dim;
    j["domain"] = cfg.dim == 1 ? Json::array({cfg.ax, cfg.bx})
                               : Json::array({cfg.ax, cfg.bx, cfg.ay, cfg.by});
    j["nodes"] = cfg.nodes;
    j["p"] = cfg.p;
    j["alpha"] = cfg.alpha;
    j["theta"] = cfg.theta;
    j["kernel"] = cfg.kernel_family;
    if (cfg.kernel_family == "scaled_fractional") j["multiplier"] = cfg.multiplier;
    j["q"] = cfg.q;
    j["r"] = cfg.r;
    j["lambda"] = resolved_lambda;
    j["lambda_source"] =
        cfg.lambda_auto ? "fraction " + format_double(cfg.lambda_fraction) + " of lambda0"
                        : "explicit";
    j["h"] = cfg.h_expr;
    j["b"] = cfg.b_expr;
    j["raw"] = cfg.raw_text;
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string field_to_csv(const Field& u) {
    std::ostringstream os;
    const Mesh& mesh = *u.mesh;
    os << (mesh.dim == 1 ? "x,value\n" : "x,y,value\n");
    for (std::size_t i = 0; i < u.size(); ++i) {
        os << format_double(mesh.node_x(i)) << ',';
        if (mesh.dim == 2) os << format_double(mesh.node_y(i)) << ',';
        os << format_double(u.values[i]) << '\n';
    }
    return os.str();
}

Field random_gaussian_field(const Mesh& mesh, std::uint64_t seed) {
    Field u(mesh);
    Rng rng(seed);
    for (double& v : u.values) v = rng.normal();
    return u;
}

RunConfig with_overrides(RunConfig cfg, const CommandOptions& opts) {
    if (opts.seed_override) cfg.seed = *opts.seed_override;
    if (opts.out_override) cfg.out_dir = *opts.out_override;
    if (opts.verbose) cfg.verbosity = std::max(cfg.verbosity, 1);
    cfg.solver.seed = cfg.seed;
    cfg.solver.verbose = cfg.verbosity > 0;
    return cfg;
}

struct Built {
    ProblemSpec spec;
    EnergyWeights weights;
    Lambda0Estimate estimate;
};

// Builds the problem, assembles weights, estimates lambda0 and (when
// requested) resolves a lambda = auto request against it.
Built build_all(const RunConfig& cfg, std::ostream& out, bool need_lambda = true) {
    Built b;
    b.spec = cfg.build_problem();
    b.weights = assemble_energy_weights(b.spec.mesh, b.spec.kernel);
    b.estimate = estimate_lambda0(b.spec, b.weights, SamplerConfig{64, 200, cfg.seed});
    if (!need_lambda) return b;
    if (cfg.lambda_auto) {
        if (!b.estimate.ok)
            throw std::invalid_argument("lambda = auto requires a lambda0 estimate, but: " +
                                        b.estimate.failure_reason);
        b.spec.lambda = cfg.lambda_fraction * b.estimate.lambda0;
    }
    if (b.estimate.ok && b.spec.lambda >= b.estimate.lambda0)
        out << "warning: lambda = " << format_double(b.spec.lambda)
            << " is not below the lambda0 estimate " << format_double(b.estimate.lambda0)
            << "; the two-branch structure is not certified there\n";
    return b;
}

} // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

Field read_field_csv(const std::filesystem::path& path, const Mesh& mesh) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read field file " + path.string());
    Field u(mesh);
    std::string line;
    std::size_t row = 0;
    bool header_skipped = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!header_skipped) {
            header_skipped = true;
            continue;
        }
        const std::size_t comma = line.find_last_of(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("malformed field CSV row: " + line);
        if (row >= u.size()) throw std::invalid_argument("field CSV has too many rows");
        u.values[row++] = std::stod(line.substr(comma + 1));
    }
    if (row != u.size())
        throw std::invalid_argument("field CSV row count " + std::to_string(row) +
                                    " does not match node count " + std::to_string(u.size()));
    return u;
}

int cmd_solve(const RunConfig& config, const CommandOptions& opts, std::ostream& out) {
    try {
        const RunConfig cfg = with_overrides(config, opts);
        Built b = build_all(cfg, out);

        const SolverResult result = solve_both(b.spec, b.weights, cfg.solver);

        if (cfg.solver.verbose) {
            const auto dump_trace = [&](const char* name, const BranchResult& br) {
                for (std::size_t k = 0; k < br.energy_trace.size(); ++k)
                    out << "trace branch=" << name << " iter=" << k
                        << " J=" << format_double(br.energy_trace[k]) << "\n";
            };
            dump_trace("plus", result.plus);
            dump_trace("minus", result.minus);
        }

        std::filesystem::create_directories(cfg.out_dir);
        const std::filesystem::path dir(cfg.out_dir);

        if (cfg.write_csv) {
            if (result.plus.converged())
                write_text_file(dir / "u_plus.csv", field_to_csv(result.plus.u));
            if (result.minus.converged())
                write_text_file(dir / "u_minus.csv", field_to_csv(result.minus.u));
        }

        if (cfg.write_json) {
            Json j;
            j["tool"] = "nehari";
            j["command"] = "solve";
            j["config"] = config_echo(cfg, b.spec.lambda);
            j["lambda0_estimate"] = estimate_to_json(b.estimate);
            if (b.estimate.ok) j["delta1_at_lambda"] = b.estimate.delta1(b.spec.lambda);
            j["status"] = to_string(result.status);
            j["plus"] = branch_to_json(result.plus);
            j["minus"] = branch_to_json(result.minus);
            j["distinctness"] = result.distinctness;
            write_text_file(dir / "result.json", j.dump(2) + "\n");
        }

        out << "status: " << to_string(result.status) << "\n";
        if (result.plus.converged())
            out << "J(u_plus)  = " << format_double(result.plus.energy)
                << "  (residual " << format_double(result.plus.residual) << ")\n";
        if (result.minus.converged())
            out << "J(u_minus) = " << format_double(result.minus.energy)
                << "  (residual " << format_double(result.minus.residual) << ")\n";
        if (result.status == SolveStatus::BothConverged) {
            out << "distinctness = " << format_double(result.distinctness) << "\n";
            return 0;
        }
        return 2;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_fibering(const RunConfig& config, const CommandOptions& opts,
                 const std::string& field_source, const std::string& phi_dump_path,
                 std::ostream& out) {
    try {
        const RunConfig cfg = with_overrides(config, opts);
        Built b = build_all(cfg, out);

        Field u;
        if (field_source.rfind("file:", 0) == 0) {
            u = read_field_csv(field_source.substr(5), b.spec.mesh);
        } else if (field_source == "random" || field_source.rfind("random:", 0) == 0) {
            std::uint64_t seed = cfg.seed;
            if (field_source.size() > 7) seed = std::stoull(field_source.substr(7));
            u = random_gaussian_field(b.spec.mesh, seed);
        } else {
            throw std::invalid_argument("field source must be random[:SEED] or file:PATH");
        }

        const ReducedIntegrals ri = reduced_integrals(b.spec, b.weights, u);
        if (!(ri.A > 0.0)) {
            out << "error: zero field (A = 0)\n";
            return 1;
        }
        const Exponents ex = Exponents::of(b.spec);
        const FiberingReport rep = critical_points(ri, ex);

        out << "class: " << rep.sign_class.name() << "\n";
        out << "A = " << format_double(ri.A) << ", B = " << format_double(ri.B)
            << ", D = " << format_double(ri.D) << "\n";
        out << "roots: " << rep.roots.size() << (rep.degenerate ? " (degenerate)" : "") << "\n";
        for (const FiberingRoot& root : rep.roots)
            out << "  t = " << format_double(root.t) << "  kind = " << to_string(root.kind)
                << "  phi = " << format_double(root.phi_value)
                << "  phi'' = " << format_double(root.phi_second_value) << "\n";
        if (rep.t_star)
            out << "t* = " << format_double(*rep.t_star)
                << "  F(t*) = " << format_double(*rep.F_at_t_star) << "\n";
        if (b.estimate.ok)
            out << "delta = " << format_double(b.estimate.delta)
                << "  lambda0 = " << format_double(b.estimate.lambda0)
                << "  lambda = " << format_double(b.spec.lambda) << "\n";
        if (!rep.note.empty()) out << "note: " << rep.note << "\n";

        Json j;
        j["class"] = rep.sign_class.name();
        j["A"] = ri.A;
        j["B"] = ri.B;
        j["D"] = ri.D;
        j["lambda"] = b.spec.lambda;
        j["degenerate"] = rep.degenerate;
        j["roots"] = Json::array();
        for (const FiberingRoot& root : rep.roots)
            j["roots"].push_back({{"t", root.t},
                                  {"kind", to_string(root.kind)},
                                  {"phi", root.phi_value},
                                  {"phi_second", root.phi_second_value}});
        if (rep.t_star) {
            j["t_star"] = *rep.t_star;
            j["F_at_t_star"] = *rep.F_at_t_star;
        }
        j["lambda0_estimate"] = estimate_to_json(b.estimate);
        if (!rep.note.empty()) j["note"] = rep.note;
        out << j.dump() << "\n";

        if (!phi_dump_path.empty()) {
            double tmax = 1.0;
            for (const FiberingRoot& root : rep.roots) tmax = std::max(tmax, root.t);
            if (rep.t_star) tmax = std::max(tmax, *rep.t_star);
            tmax *= 2.0;
            std::ostringstream os;
            os << "t,phi\n";
            const int samples = 256;
            for (int k = 0; k <= samples; ++k) {
                const double t = tmax * k / samples;
                os << format_double(t) << ',' << format_double(phi(ri, ex, t)) << '\n';
            }
            write_text_file(phi_dump_path, os.str());
        }
        return 0;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_lambda0(const RunConfig& config, const CommandOptions& opts, std::ostream& out) {
    try {
        const RunConfig cfg = with_overrides(config, opts);
        Built b = build_all(cfg, out, /*need_lambda=*/false);

        out << "lambda0 estimate (sampled, desk-scale):\n";
        out << "  S_p  = " << format_double(b.estimate.S_p) << "\n";
        out << "  S_q1 = " << format_double(b.estimate.S_q1) << "\n";
        out << "  S_r1 = " << format_double(b.estimate.S_r1) << "\n";
        out << "  M    = " << format_double(b.estimate.M) << "\n";
        out << "  delta = " << format_double(b.estimate.delta) << "\n";
        out << "  c     = " << format_double(b.estimate.c_const) << "\n";
        out << "  lambda0 = " << format_double(b.estimate.lambda0) << "\n";
        out << estimate_to_json(b.estimate).dump() << "\n";
        return b.estimate.ok ? 0 : 2;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_validate_kernel(const RunConfig& config, const CommandOptions& opts,
                        std::ostream& out) {
    try {
        const RunConfig cfg = with_overrides(config, opts);
        cfg.validate();
        const KernelSpec kernel = cfg.build_kernel();
        const KernelCheckReport rep = check_admissible(kernel, 64, cfg.seed);

        out << "kernel: " << to_string(kernel.family) << " (n=" << kernel.n
            << ", p=" << format_double(kernel.p) << ", alpha=" << format_double(kernel.alpha)
            << ", theta=" << format_double(kernel.theta) << ")\n";
        out << "  mK integral = " << format_double(rep.mk_integral)
            << " (tail " << format_double(rep.mk_tail) << ")\n";
        out << "  integrable_ok  = " << (rep.integrable_ok ? "yes" : "no") << "\n";
        out << "  lower_bound_ok = " << (rep.lower_bound_ok ? "yes" : "no")
            << " (worst ratio " << format_double(rep.worst_lower_ratio) << ")\n";
        out << "  symmetry_ok    = " << (rep.symmetry_ok ? "yes" : "no")
            << " (max asymmetry " << format_double(rep.max_asymmetry) << ")\n";

        Json j;
        j["family"] = to_string(kernel.family);
        j["mk_integral"] = rep.mk_integral;
        j["mk_tail"] = rep.mk_tail;
        j["integrable_ok"] = rep.integrable_ok;
        j["lower_bound_ok"] = rep.lower_bound_ok;
        j["worst_lower_ratio"] = rep.worst_lower_ratio;
        j["symmetry_ok"] = rep.symmetry_ok;
        j["max_asymmetry"] = rep.max_asymmetry;
        j["admissible"] = rep.admissible();
        out << j.dump() << "\n";
        return rep.admissible() ? 0 : 2;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace nehari
