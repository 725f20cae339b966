#include "nehari/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nehari/expression.hpp"

namespace nehari {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        return s.substr(1, s.size() - 2);
    return s;
}

[[noreturn]] void fail(int line_no, const std::string& what) {
    throw std::invalid_argument("config error (line " + std::to_string(line_no) + "): " + what);
}

double parse_num(const std::string& v, int line_no, const std::string& key) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) fail(line_no, "malformed number for '" + key + "': " + v);
        return x;
    } catch (const std::invalid_argument&) {
        fail(line_no, "malformed number for '" + key + "': " + v);
    } catch (const std::out_of_range&) {
        fail(line_no, "number out of range for '" + key + "': " + v);
    }
}

long parse_int(const std::string& v, int line_no, const std::string& key) {
    const double x = parse_num(v, line_no, key);
    const long i = static_cast<long>(x);
    if (static_cast<double>(i) != x) fail(line_no, "'" + key + "' must be an integer: " + v);
    return i;
}

bool parse_bool(const std::string& v, int line_no, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(line_no, "'" + key + "' must be a boolean: " + v);
}

struct Setter {
    RunConfig& cfg;

    // Returns false for an unknown (section, key) pair.
    bool apply(const std::string& section, const std::string& key, const std::string& value,
               int line_no) {
        const std::string v = unquote(value);
        if (section.empty()) {
            if (key == "seed") {
                cfg.seed = static_cast<std::uint64_t>(parse_int(v, line_no, key));
                return true;
            }
            return false;
        }
        if (section == "problem") return apply_problem(key, v, line_no);
        if (section == "solver") return apply_solver(key, v, line_no);
        if (section == "output") return apply_output(key, v, line_no);
        fail(line_no, "unknown section [" + section + "]");
    }

    bool apply_problem(const std::string& key, const std::string& v, int ln) {
        if (key == "dim") cfg.dim = static_cast<int>(parse_int(v, ln, key));
        else if (key == "domain") {
            std::istringstream iss(v);
            std::vector<double> parts;
            double x;
            while (iss >> x) parts.push_back(x);
            if (parts.size() == 2) {
                cfg.ax = parts[0];
                cfg.bx = parts[1];
            } else if (parts.size() == 4) {
                cfg.ax = parts[0];
                cfg.bx = parts[1];
                cfg.ay = parts[2];
                cfg.by = parts[3];
            } else {
                fail(ln, "'domain' needs 2 (1D) or 4 (2D) numbers");
            }
        } else if (key == "nodes") cfg.nodes = static_cast<int>(parse_int(v, ln, key));
        else if (key == "p") cfg.p = parse_num(v, ln, key);
        else if (key == "alpha") cfg.alpha = parse_num(v, ln, key);
        else if (key == "theta") cfg.theta = parse_num(v, ln, key);
        else if (key == "kernel") cfg.kernel_family = v;
        else if (key == "multiplier") cfg.multiplier = parse_num(v, ln, key);
        else if (key == "q") cfg.q = parse_num(v, ln, key);
        else if (key == "r") cfg.r = parse_num(v, ln, key);
        else if (key == "lambda") {
            if (v == "auto") cfg.lambda_auto = true;
            else {
                cfg.lambda_auto = false;
                cfg.lambda = parse_num(v, ln, key);
            }
        } else if (key == "lambda_fraction") cfg.lambda_fraction = parse_num(v, ln, key);
        else if (key == "h") cfg.h_expr = v;
        else if (key == "b") cfg.b_expr = v;
        else return false;
        return true;
    }

    bool apply_solver(const std::string& key, const std::string& v, int ln) {
        if (key == "max_outer_iters")
            cfg.solver.max_outer_iters = static_cast<int>(parse_int(v, ln, key));
        else if (key == "step_initial") cfg.solver.step_initial = parse_num(v, ln, key);
        else if (key == "step_shrink") cfg.solver.step_shrink = parse_num(v, ln, key);
        else if (key == "sufficient_decrease")
            cfg.solver.sufficient_decrease = parse_num(v, ln, key);
        else if (key == "tol_residual") cfg.solver.tol_residual = parse_num(v, ln, key);
        else if (key == "tol_step") cfg.solver.tol_step = parse_num(v, ln, key);
        else if (key == "multistart")
            cfg.solver.multistart = static_cast<int>(parse_int(v, ln, key));
        else if (key == "truncate_negative")
            cfg.solver.truncate_negative = parse_bool(v, ln, key);
        else return false;
        return true;
    }

    bool apply_output(const std::string& key, const std::string& v, int ln) {
        if (key == "dir") cfg.out_dir = v;
        else if (key == "formats") {
            cfg.write_csv = v.find("csv") != std::string::npos;
            cfg.write_json = v.find("json") != std::string::npos;
            if (!cfg.write_csv && !cfg.write_json)
                fail(ln, "'formats' must mention csv and/or json");
        } else if (key == "verbosity") cfg.verbosity = static_cast<int>(parse_int(v, ln, key));
        else return false;
        return true;
    }
};

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

} // namespace

RunConfig RunConfig::parse_text(const std::string& text) {
    RunConfig cfg;
    cfg.raw_text = text;
    Setter setter{cfg};
    std::istringstream iss(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(iss, line)) {
        ++line_no;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') fail(line_no, "malformed section header: " + body);
            section = trim(body.substr(1, body.size() - 2));
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value': " + body);
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty() || value.empty()) fail(line_no, "empty key or value");
        if (!setter.apply(section, key, value, line_no))
            fail(line_no, "unknown key '" + key + "' in section [" + section + "]");
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config error: cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

void RunConfig::apply_env_overrides() {
    Setter setter{*this};
    const struct {
        const char* section;
        const char* key;
    } keys[] = {
        {"", "seed"},
        {"problem", "dim"}, {"problem", "domain"}, {"problem", "nodes"}, {"problem", "p"},
        {"problem", "alpha"}, {"problem", "theta"}, {"problem", "kernel"},
        {"problem", "multiplier"}, {"problem", "q"}, {"problem", "r"}, {"problem", "lambda"},
        {"problem", "lambda_fraction"}, {"problem", "h"}, {"problem", "b"},
        {"solver", "max_outer_iters"}, {"solver", "step_initial"}, {"solver", "step_shrink"},
        {"solver", "sufficient_decrease"}, {"solver", "tol_residual"}, {"solver", "tol_step"},
        {"solver", "multistart"}, {"solver", "truncate_negative"},
        {"output", "dir"}, {"output", "formats"}, {"output", "verbosity"},
    };
    for (const auto& k : keys) {
        std::string name = "NEHARI_";
        if (k.section[0] != '\0') name += upper(k.section) + "_";
        name += upper(k.key);
        if (const char* v = std::getenv(name.c_str()))
            setter.apply(k.section, k.key, v, 0);
    }
}

void RunConfig::validate() const {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("config: dim in {1,2} violated (dim=" +
                                    std::to_string(dim) + ")");
    if (nodes < 2)
        throw std::invalid_argument("config: nodes >= 2 violated (nodes=" +
                                    std::to_string(nodes) + ")");
    if (!(bx > ax) || (dim == 2 && !(by > ay)))
        throw std::invalid_argument("config: nondegenerate domain violated");
    if (kernel_family != "fractional" && kernel_family != "scaled_fractional")
        throw std::invalid_argument("config: unknown kernel family '" + kernel_family +
                                    "' (fractional | scaled_fractional)");
    const KernelSpec k = build_kernel();  // validates p, alpha, theta, multiplier
    if (!(q > 0.0))
        throw std::invalid_argument("config: q > 0 violated (q=" + std::to_string(q) + ")");
    if (!(q < p - 1.0))
        throw std::invalid_argument("config: q < p-1 violated (q=" + std::to_string(q) +
                                    ", p=" + std::to_string(p) + ")");
    if (!(r > p - 1.0))
        throw std::invalid_argument("config: p-1 < r violated (r=" + std::to_string(r) +
                                    ", p=" + std::to_string(p) + ")");
    const double pstar = k.sobolev_critical();
    if (std::isfinite(pstar) && !(r < pstar - 1.0))
        throw std::invalid_argument("config: r < p*-1 violated (r=" + std::to_string(r) +
                                    ", p*=" + std::to_string(pstar) + ")");
    if (lambda_auto) {
        if (!(lambda_fraction > 0.0))
            throw std::invalid_argument("config: lambda_fraction > 0 violated");
    } else if (!(lambda > 0.0)) {
        throw std::invalid_argument("config: lambda > 0 violated (lambda=" +
                                    std::to_string(lambda) + ")");
    }
    Expression::parse(h_expr);
    Expression::parse(b_expr);
    solver.validate();
}

KernelSpec RunConfig::build_kernel() const {
    if (kernel_family == "scaled_fractional")
        return KernelSpec::scaled_fractional(dim, p, alpha, theta, multiplier);
    return KernelSpec::fractional(dim, p, alpha, theta);
}

ProblemSpec RunConfig::build_problem() const {
    validate();
    ProblemSpec spec;
    spec.kernel = build_kernel();
    spec.mesh = dim == 1 ? build_mesh(ax, bx, nodes) : build_mesh(ax, bx, ay, by, nodes);
    spec.q = q;
    spec.r = r;
    spec.lambda = lambda_auto ? 1.0 : lambda;  // placeholder until resolved
    const Expression he = Expression::parse(h_expr);
    const Expression be = Expression::parse(b_expr);
    const std::size_t n = spec.mesh.node_count();
    spec.h_values.resize(n);
    spec.b_values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = spec.mesh.node_x(i);
        const double y = dim == 2 ? spec.mesh.node_y(i) : 0.0;
        spec.h_values[i] = he.eval(x, y);
        spec.b_values[i] = be.eval(x, y);
    }
    spec.validate();
    return spec;
}

} // namespace nehari
