#include "nilmel/cli.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nilmel/constants.hpp"
#include "nilmel/cycles.hpp"
#include "nilmel/expansion.hpp"
#include "nilmel/hamiltonian.hpp"
#include "nilmel/lienard.hpp"
#include "nilmel/ovals.hpp"

namespace nilmel {

namespace {

using Json = nlohmann::ordered_json;

class SchemaError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot read " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Json parse_json(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw SchemaError(what + ": " + e.what());
    }
}

Rational json_rational(const Json& j, const std::string& what) {
    if (!j.is_string()) throw SchemaError(what + ": rationals are \"p/q\" strings");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const ExactError& e) {
        throw SchemaError(what + ": " + e.what());
    }
}

Real parse_real(const std::string& s, const std::string& what) {
    try {
        return Real(s);
    } catch (const std::exception&) {
        throw SchemaError(what + ": not a number: " + s);
    }
}

std::string dec(const Real& x, unsigned digits) { return to_decimal(x, static_cast<int>(digits)); }

HamiltonianModel load_hamiltonian(const std::string& path) {
    if (path.empty()) return HamiltonianModel::lienard();
    try {
        return HamiltonianModel::from_json(read_file(path));
    } catch (const ExactError& e) {
        throw SchemaError(e.what());
    }
}

// a-vector file: ["p/q", ...] (a_0 first) or {"a": [...]}
std::vector<Rational> load_a_vector(const std::string& path) {
    Json j = parse_json(read_file(path), path);
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            if (k != "a") throw SchemaError(path + ": unknown key " + k);
        if (!j.contains("a")) throw SchemaError(path + ": missing key a");
        j = j["a"];
    }
    if (!j.is_array()) throw SchemaError(path + ": expected an array of \"p/q\" strings");
    if (j.size() > 13) throw SchemaError(path + ": at most 13 coefficients a_0..a_12");
    std::vector<Rational> a;
    for (const auto& v : j) a.push_back(json_rational(v, path));
    return a;
}

// {"p": [{"i","j","c"}], "q": [...]} or a Lienard a-vector ({"a": [...]} / [...])
PerturbationPoly load_perturbation(const std::string& path) {
    const Json j = parse_json(read_file(path), path);
    if (j.is_array() || (j.is_object() && j.contains("a"))) return lienard_perturbation(load_a_vector(path));
    if (!j.is_object()) throw SchemaError(path + ": expected an object");
    PerturbationPoly pq;
    for (const auto& [k, v] : j.items()) {
        if (k != "p" && k != "q") throw SchemaError(path + ": unknown key " + k);
        if (!v.is_array()) throw SchemaError(path + ": " + k + " must be an array");
        auto& target = k == "p" ? pq.a : pq.b;
        for (const auto& t : v) {
            if (!t.is_object() || !t.contains("i") || !t.contains("j") || !t.contains("c") || t.size() != 3 ||
                !t["i"].is_number_integer() || !t["j"].is_number_integer())
                throw SchemaError(path + ": terms are {\"i\": int, \"j\": int, \"c\": \"p/q\"}");
            const int i = t["i"].get<int>(), jj = t["j"].get<int>();
            if (i < 0 || jj < 0) throw SchemaError(path + ": negative exponent");
            target[{i, jj}] = json_rational(t["c"], path);
        }
    }
    return pq;
}

Side side_of(const std::string& s) {
    try {
        return parse_side(s);
    } catch (const std::exception& e) {
        throw SchemaError(e.what());
    }
}

// "geometric:a,b,n"
std::vector<Real> parse_grid(const std::string& spec, Side side) {
    const std::string prefix = "geometric:";
    if (spec.rfind(prefix, 0) != 0) throw SchemaError("h-grid must be geometric:a,b,n");
    std::stringstream ss(spec.substr(prefix.size()));
    std::string a, b, n;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, n) || n.empty())
        throw SchemaError("h-grid must be geometric:a,b,n");
    int count = 0;
    try {
        size_t used = 0;
        count = std::stoi(n, &used);
        if (used != n.size()) throw std::invalid_argument(n);
    } catch (const std::exception&) {
        throw SchemaError("h-grid: n must be an integer");
    }
    try {
        return geometric_grid(parse_real(a, "h-grid"), parse_real(b, "h-grid"), count, side);
    } catch (const SchemaError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("h-grid: ") + e.what());
    }
}

Json algebraic_json(const AlgebraicElement& e, unsigned digits) {
    Json terms = Json::array();
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < AlgebraicElement::kBetaDegree; ++k)
            if (sgn(e.coeff(s, k)) != 0) terms.push_back({{"s", s}, {"k", k}, {"c", to_string(e.coeff(s, k))}});
    Json j;
    j["terms"] = terms;
    j["h6"] = e.has_context() ? to_string(e.h6()) : std::string("0");
    try {
        j["value"] = dec(e.to_real(), digits);
    } catch (const std::exception&) {
        j["value"] = nullptr;
    }
    return j;
}

Json report_json(const ZeroCountReport& r, const ChainSpec* spec) {
    static const char* const names[3] = {"f1", "f2", "f3"};
    Json j;
    if (spec) {
        j["l"] = spec->l;
        j["variant"] = spec->variant;
        j["branch"] = std::string(1, spec->branch);
        j["c8"] = spec->c8_negative ? "negative" : "positive";
        j["ratio"] = dec(spec->ratio, 6);
        j["base"] = dec(spec->base, 6);
    }
    j["precision_digits"] = r.digits;
    j["window"] = {{"h_lo", dec(r.h_lo, 6)}, {"h_hi", dec(r.h_hi, 6)}, {"points", r.points}};
    j["counts"] = {r.counts[0], r.counts[1], r.counts[2]};
    j["total"] = r.total;
    j["ambiguous"] = {r.ambiguous[0], r.ambiguous[1], r.ambiguous[2]};
    if (r.expected) j["expected_counts"] = {(*r.expected)[0], (*r.expected)[1], (*r.expected)[2]};
    j["expected_total"] = r.expected_total;
    j["matches"] = r.matches;
    Json zs;
    for (int f = 0; f < 3; ++f) {
        Json list = Json::array();
        for (const auto& z : r.zeros[f])
            list.push_back({{"abs_h", dec(z.t, 12)},
                            {"bracket", {dec(z.lo, 20), dec(z.hi, 20)}},
                            {"f_at_bracket", {dec(z.f_lo, 6), dec(z.f_hi, 6)}}});
        zs[names[f]] = list;
    }
    j["zeros"] = zs;
    return j;
}

Json solution_json(const CaseSolution& s) {
    Json j;
    j["case"] = s.id;
    j["vanishing"] = s.vanishing;
    j["unknowns"] = s.n_vars;
    j["free_variables"] = s.free_vars;
    Json rel;
    for (const auto& [i, row] : s.relation) {
        Json r = Json::object();
        for (const auto& [f, c] : row) r["a" + std::to_string(f)] = to_string(c);
        rel["a" + std::to_string(i)] = r;
    }
    j["relations"] = rel;
    j["certificate"] = s.certificate;
    j["certificate_tag"] = to_string(s.certificate_tag);
    Json cert;
    for (const auto& [f, c] : s.certificate_coeff) cert["a" + std::to_string(f)] = c.to_string();
    j["certificate_coefficients"] = cert;
    j["rank"] = s.rank;
    j["rank_split_consistent"] = s.split_consistent;
    Json checks = Json::array();
    for (const auto& c : s.checks)
        checks.push_back({{"what", c.what}, {"printed", c.printed}, {"computed", c.computed}, {"match", c.match}});
    j["printed_checks"] = checks;
    j["all_printed_match"] = s.all_printed_match();
    return j;
}

Json coefficients_json(const LienardParams& p, unsigned digits) {
    PrecisionScope ps(digits + 10);
    const UniversalConstants k = digits <= 30 ? default_constants() : compute_constants(digits);
    Json j;
    for (const auto& f : lienard_coefficients()) {
        const PiLinear in = f.inner(p);
        j[f.name] = {{"exact", "sqrt2*" + to_string(f.tag) + "*(" + in.to_string() + ")"},
                     {"value", dec(f.value(p, k), digits)}};
    }
    return j;
}

Json fit_json(const FitResult& r, unsigned digits) {
    Json j;
    j["side"] = to_string(r.side);
    j["basis"] = r.basis;
    Json c = Json::array(), e = Json::array();
    for (const auto& v : r.coefficients) c.push_back(dec(v, digits));
    for (const auto& v : r.stderrs) e.push_back(dec(v, 6));
    j["coefficients"] = c;
    j["stderr"] = e;
    j["condition"] = dec(r.condition, 6);
    j["ill_conditioned"] = r.ill_conditioned;
    j["residual_norm"] = dec(r.residual_norm, 6);
    return j;
}

// CSV with a header line and two numeric columns h, M
BasisSample read_samples(const std::string& path, Side side) {
    std::istringstream in(read_file(path));
    std::string line;
    BasisSample s;
    s.side = side;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        if (row == 1 && line.find_first_of("0123456789") != 0 && line[0] != '-' && line[0] != '.') continue;  // header
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw SchemaError(path + ": row " + std::to_string(row) + " needs h,M");
        s.h.push_back(parse_real(line.substr(0, comma), path));
        s.M.push_back(parse_real(line.substr(comma + 1), path));
    }
    return s;
}

struct Ctx {
    std::ostream* out;
    unsigned digits = 30;
};

void emit(Ctx& c, const Json& j) { *c.out << j.dump(2) << "\n"; }

ChainSpec make_spec(int l, int variant, const std::string& branch, const std::string& c8, const std::string& ratio,
                    const std::string& base) {
    ChainSpec s;
    s.l = l;
    s.variant = variant;
    if (branch != "A" && branch != "B") throw SchemaError("branch must be A or B");
    s.branch = branch[0];
    if (c8 != "negative" && c8 != "positive") throw SchemaError("c8 must be negative or positive");
    s.c8_negative = c8 == "negative";
    s.ratio = parse_real(ratio, "ratio");
    s.base = parse_real(base, "base");
    return s;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Melnikov expansions near a nilpotent saddle loop"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string output, config;
    app.add_option("-o,--output", output, "write the artifact to this file");
    app.add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);

    unsigned digits = 30;
    std::string ham_path, pq_path, a_path, side = "inner-right", input, grid;
    std::string h_value, tol = "1e-25";
    int nodes = 64, order = 14, remainder = 3, case_id = 1;

    auto* constants = app.add_subcommand("constants", "the universal constants");
    constants->add_option("--digits", digits)->check(CLI::Range(10u, 200u));

    auto* classify = app.add_subcommand("classify", "type of the origin");
    classify->add_option("--hamiltonian", ham_path)->required()->check(CLI::ExistingFile);

    auto* hseries = app.add_subcommand("h-series", "h_j of H(x, phi(x))");
    hseries->add_option("--hamiltonian", ham_path)->required()->check(CLI::ExistingFile);
    hseries->add_option("--order", order)->check(CLI::Range(1, kMaxSeriesOrder));

    auto* chain = app.add_subcommand("chain", "mu, mu-bar and n-bar coefficients");
    chain->add_option("--hamiltonian", ham_path)->required()->check(CLI::ExistingFile);
    chain->add_option("--digits", digits)->check(CLI::Range(10u, 200u));

    auto* trace = app.add_subcommand("trace", "nodes of one oval as CSV x,y,weight");
    trace->add_option("--hamiltonian", ham_path, "default: the Lienard H")->check(CLI::ExistingFile);
    trace->set_help_flag("--help", "print this help");  // -h would clash with --h
    trace->add_option("--h", h_value)->required();
    trace->add_option("--side", side);
    trace->add_option("--nodes", nodes)->check(CLI::Range(4, 100000));
    trace->add_option("--digits", digits)->check(CLI::Range(10u, 200u));

    auto* msample = app.add_subcommand("melnikov-sample", "M(h) on a grid as CSV h,M");
    msample->add_option("--hamiltonian", ham_path, "default: the Lienard H")->check(CLI::ExistingFile);
    msample->add_option("--perturbation", pq_path, "{p, q} terms or a Lienard a-vector")
        ->required()
        ->check(CLI::ExistingFile);
    msample->add_option("--side", side);
    msample->add_option("--h-grid", grid, "geometric:a,b,n in |h|")->required();
    msample->add_option("--tol", tol);
    msample->add_option("--digits", digits)->check(CLI::Range(10u, 200u));

    auto* fit = app.add_subcommand("fit", "least-squares coefficients from a sample CSV");
    fit->add_option("--input", input)->required()->check(CLI::ExistingFile);
    fit->add_option("--side", side);
    fit->add_option("--remainder-terms", remainder)->check(CLI::Range(0, 60));
    fit->add_option("--digits", digits)->check(CLI::Range(10u, 200u));

    auto* lienard = app.add_subcommand("lienard", "the Lienard application");
    lienard->require_subcommand(1);
    auto* lcoeffs = lienard->add_subcommand("coeffs", "closed-form coefficients for an a-vector");
    lcoeffs->add_option("--a", a_path)->required()->check(CLI::ExistingFile);
    lcoeffs->add_option("--digits", digits)->check(CLI::Range(10u, 200u));
    auto* lsolve = lienard->add_subcommand("solve", "exact solve of a case");
    lsolve->add_option("--case", case_id)->required()->check(CLI::Range(1, 3));
    auto* lrank = lienard->add_subcommand("rank", "Jacobian rank of a case");
    lrank->add_option("--case", case_id)->required()->check(CLI::Range(1, 3));

    int l = 9, variant = 1, ppd = 200;
    std::string branch = "A", c8 = "negative", ratio = "1e-4", base = "1e-2";
    unsigned count_digits = 60;
    auto* cycles = app.add_subcommand("cycles", "zero counts of the truncated expansions");
    cycles->require_subcommand(1);
    auto* ccount = cycles->add_subcommand("count", "build a chain and count zeros");
    ccount->add_option("--l", l)->check(CLI::Range(6, 9));
    ccount->add_option("--variant", variant)->check(CLI::Range(1, 3));
    ccount->add_option("--branch", branch);
    ccount->add_option("--c8", c8, "negative or positive");
    ccount->add_option("--ratio", ratio);
    ccount->add_option("--base", base);
    ccount->add_option("--digits", count_digits)->check(CLI::Range(20u, 400u));
    ccount->add_option("--points-per-decade", ppd)->check(CLI::Range(1, 10000));

    bool no_fit = false;
    auto* repro = app.add_subcommand("reproduce-theorem-3.1", "solve, rank, sample, fit and count for one case");
    repro->add_option("--case", case_id)->required()->check(CLI::Range(1, 3));
    repro->add_flag("--no-fit", no_fit, "skip the sampling and fitting stage");
    repro->add_option("--points-per-decade", ppd)->check(CLI::Range(1, 10000));

    // a config file supplies the same options: {"subcommand": "lienard solve", "case": 1, ...}
    std::vector<std::string> argv = args;
    for (size_t i = 0; i + 1 < argv.size(); ++i)
        if (argv[i] == "--config") {
            const Json cfg = parse_json(read_file(argv[i + 1]), argv[i + 1]);
            if (!cfg.is_object() || !cfg.contains("subcommand") || !cfg["subcommand"].is_string())
                throw SchemaError("config: needs a \"subcommand\" string");
            std::vector<std::string> expanded;
            std::istringstream words(cfg["subcommand"].get<std::string>());
            for (std::string w; words >> w;) expanded.push_back(w);
            for (const auto& [k, v] : cfg.items()) {
                if (k == "subcommand") continue;
                if (v.is_boolean()) {
                    if (v.get<bool>()) expanded.push_back("--" + k);
                    continue;
                }
                if (!v.is_string() && !v.is_number()) throw SchemaError("config: " + k + " must be a string or number");
                expanded.push_back("--" + k);
                expanded.push_back(v.is_string() ? v.get<std::string>() : v.dump());
            }
            argv.erase(argv.begin() + i, argv.begin() + i + 2);
            argv.insert(argv.end(), expanded.begin(), expanded.end());
            break;
        }

    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        throw SchemaError(e.what());
    }

    std::ofstream file;
    std::ostream* sink = &out;
    if (!output.empty()) {
        file.open(output);
        if (!file) throw SchemaError("cannot write " + output);
        sink = &file;
    }
    Ctx ctx{sink, digits};
    (void)err;

    if (*constants) {
        const auto k = compute_constants(digits);
        Json j;
        j["digits"] = digits;
        const auto named = k.named();
        for (size_t i = 0; i < named.size(); ++i) {
            const auto& [name, v] = named[i];
            j[name] = {{"value", dec(v, digits)}, {"error", dec(k.errors[i], 3)}};
        }
        j["signs_ok"] = k.signs_ok();
        emit(ctx, j);
    } else if (*classify) {
        const auto h = load_hamiltonian(ham_path);
        const auto c = classify_origin(h);
        emit(ctx, {{"kind", to_string(c.kind)}, {"k", c.k}, {"hk", to_string(c.hk)}});
    } else if (*hseries) {
        const auto h = load_hamiltonian(ham_path);
        const auto s = h_series(h, order);
        Json hs = Json::array();
        for (const auto& v : s.hj) hs.push_back(to_string(v));
        emit(ctx, {{"order", order}, {"h", hs}});
    } else if (*chain) {
        const auto h = load_hamiltonian(ham_path);
        const auto s = h_series(h, 14);
        if (!(s.at(6) < 0)) throw SchemaError("chain needs h_6 < 0");
        PrecisionScope ps(digits);
        const auto cc = mu_chain(s, s.at(6));
        Json mu, mub, nb;
        for (int i = 1; i <= 9; ++i) mu["mu" + std::to_string(i)] = algebraic_json(cc.mu[i], digits);
        for (int i = 1; i <= 8; ++i) mub["mu_bar" + std::to_string(i)] = algebraic_json(cc.mu_bar[i], digits);
        for (int i = 0; i <= 8; ++i) nb["n_bar" + std::to_string(i)] = algebraic_json(cc.n_bar[i], digits);
        emit(ctx, {{"h6", to_string(s.at(6))}, {"mu", mu}, {"mu_bar", mub}, {"n_bar", nb}});
    } else if (*trace) {
        PrecisionScope ps(digits);
        const auto H = load_hamiltonian(ham_path);
        const Oval o = trace_oval(H, parse_real(h_value, "h"), side_of(side), nodes);
        *sink << "x,y,weight\n";
        for (const auto& n : o.nodes) *sink << dec(n.x, digits) << "," << dec(n.y, digits) << "," << dec(n.weight, digits) << "\n";
    } else if (*msample) {
        PrecisionScope ps(digits);
        const auto H = load_hamiltonian(ham_path);
        const auto pq = load_perturbation(pq_path);
        const Side sd = side_of(side);
        const auto s = sample_melnikov(H, pq, sd, parse_grid(grid, sd), parse_real(tol, "tol"));
        *sink << "h,M\n";
        for (size_t i = 0; i < s.h.size(); ++i) *sink << dec(s.h[i], digits) << "," << dec(s.M[i], digits) << "\n";
    } else if (*fit) {
        PrecisionScope ps(digits);
        const Side sd = side_of(side);
        FitOptions opt;
        opt.remainder_terms = remainder;
        emit(ctx, fit_json(fit_expansion(read_samples(input, sd), opt), digits));
    } else if (*lcoeffs) {
        const auto p = LienardParams::from_vector(load_a_vector(a_path));
        Json a = Json::array();
        for (const auto& v : p.a) a.push_back(to_string(v));
        emit(ctx, {{"a", a}, {"digits", digits}, {"coefficients", coefficients_json(p, digits)}});
    } else if (*lsolve) {
        emit(ctx, solution_json(solve_case(case_id)));
    } else if (*lrank) {
        emit(ctx, {{"case", case_id}, {"rank", jacobian_rank(case_id)}});
    } else if (*ccount) {
        const ChainSpec s = make_spec(l, variant, branch, c8, ratio, base);
        emit(ctx, report_json(count_chain(s, count_digits, ppd), &s));
    } else if (*repro) {
        const auto sol = solve_case(case_id);
        Json j;
        j["case"] = case_id;
        j["solution"] = solution_json(sol);
        j["rank"] = jacobian_rank(case_id);
        // one point of the solution family: the leading parameter 1, other free parameters 0
        std::map<int, Rational> free;
        for (int f : sol.free_vars) free[f] = f == sol.leading ? 1 : 0;
        const auto p = sol.instantiate(free);
        Json a = Json::array();
        for (const auto& v : p.a) a.push_back(to_string(v));
        j["a"] = a;
        j["coefficients"] = coefficients_json(p, 20);
        if (!no_fit) {
            PrecisionScope ps(40);
            const auto g = geometric_grid(Real("1e-8"), Real("1e-1"), 120, Side::InnerRight);
            FitOptions opt;
            opt.remainder_terms = 25;
            const auto r = fit_expansion(
                sample_melnikov(HamiltonianModel::lienard(), p.perturbation(), Side::InnerRight, g, Real("1e-32")), opt);
            Json fj = fit_json(r, 12);
            fj["grid"] = "geometric:1e-8,1e-1,120";
            fj["closed_form"] = Json::array();
            const auto e = lienard_expansion(p, default_constants());
            for (const auto& v : e.c) fj["closed_form"].push_back(dec(v, 12));
            j["fit"] = fj;
        }
        ChainSpec s;
        s.l = case_chain_length(case_id);
        const auto r = count_chain(s, 60, ppd);
        j["zero_count"] = report_json(r, &s);
        j["limit_cycles"] = limit_cycle_count(s.l);
        emit(ctx, j);
    }
    return kExitOk;
}

void diagnose(std::ostream& err, const char* kind, const std::string& msg) {
    err << Json{{"error", kind}, {"message", msg}}.dump() << "\n";
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const std::invalid_argument& e) {  // schema, chain and fit input errors
        diagnose(err, "schema", e.what());
        return kExitSchema;
    } catch (const ExactError& e) {
        diagnose(err, "schema", e.what());
        return kExitSchema;
    } catch (const LevelOutOfRange& e) {
        diagnose(err, "schema", e.what());
        return kExitSchema;
    } catch (const TopologyError& e) {
        diagnose(err, "schema", e.what());
        return kExitSchema;
    } catch (const std::exception& e) {
        diagnose(err, "numeric", e.what());
        return kExitNumeric;
    }
}

} // namespace nilmel
