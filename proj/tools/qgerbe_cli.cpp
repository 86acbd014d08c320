// qgerbe: scenario runner for the gerbe toolkit.
// Exit codes: 0 pass, 1 a check failed, 2 bad input.

#include <qgerbe/io.hpp>
#include <qgerbe/qgerbe.hpp>

#include <CLI11/CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using qgerbe::io::json;
namespace fs = std::filesystem;

struct Options {
    std::string scenario;
    std::string out;
    std::uint64_t seed = 1;
    std::optional<double> tol;
    std::optional<std::size_t> quad_nodes;
    std::optional<double> eps;
    // trivialise without a scenario
    std::string kind;
    std::string params;
    std::string grid;
    // verify
    std::string suite = "all";
};

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Writes to <out>/<name> through a temporary file, or to stdout.
void emit(const Options& o, const std::string& name, const std::string& content)
{
    if (o.out.empty()) {
        std::cout << content;
        return;
    }
    std::error_code ec;
    fs::create_directories(o.out, ec);
    const fs::path target = fs::path(o.out) / name;
    const fs::path tmp = fs::path(o.out) / ("." + name + ".tmp");
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f)
            throw InputError("cannot write to output directory " + o.out);
        f << content;
        if (!f.flush())
            throw InputError("failed writing " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec)
        throw InputError("cannot move output into place: " + ec.message());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

qgerbe::io::Document load(const Options& o)
{
    if (o.scenario.empty())
        throw InputError("--scenario is required for this subcommand");
    return qgerbe::io::Document::from_file(o.scenario);
}

qgerbe::QuadratureSpec quad_for(const Options& o, const qgerbe::io::Document* doc)
{
    qgerbe::QuadratureSpec q = doc ? qgerbe::io::quadrature(*doc, doc->root()) : qgerbe::QuadratureSpec{};
    if (o.quad_nodes)
        q.nodes = *o.quad_nodes;
    if (o.eps) {
        const double e = *o.eps;
        q.eps = {16 * e, 8 * e, 4 * e, 2 * e, e};
    }
    q.validate();
    return q;
}

json complex_json(qgerbe::cplx z)
{
    return {{"re", z.real()}, {"im", z.imag()}, {"modulus", std::abs(z)}, {"phase", std::arg(z)}};
}

int cmd_propagator(const Options& o)
{
    const auto doc = load(o);
    const auto k = qgerbe::io::kernel(doc, doc.need(doc.root(), "kernel"));
    const json& pairs = doc.need(doc.root(), "pairs");
    if (!pairs.is_array() || pairs.empty())
        doc.fail("pairs", "\"pairs\" must be a nonempty array");
    json results = json::array();
    for (const auto& p : pairs) {
        const auto a = qgerbe::io::event(doc, p, "a");
        const auto b = qgerbe::io::event(doc, p, "b");
        const qgerbe::cplx g = qgerbe::propagator(k, a, b);
        json r = complex_json(g);
        r["action"] = qgerbe::classical_action(k, a, b);
        results.push_back(r);
    }
    emit(o, "propagator.json", dump({{"kind", qgerbe::to_string(k.kind)}, {"results", results}}));
    return 0;
}

int cmd_compose(const Options& o)
{
    const auto doc = load(o);
    const json& root = doc.root();
    const auto k = qgerbe::io::kernel(doc, doc.need(root, "kernel"));
    const auto a = qgerbe::io::event(doc, root, "a");
    const auto b = qgerbe::io::event(doc, root, "b");
    const double tmid = doc.number(root, "tmid", 0.5 * (a.t + b.t));
    const double tol = o.tol.value_or(doc.number(root, "tol", 1e-5));
    const auto quad = quad_for(o, &doc);
    const qgerbe::cplx direct = qgerbe::propagator(k, a, b);
    const qgerbe::cplx comp = qgerbe::compose_semigroup(k, a, tmid, b, quad);
    const double rel = std::abs(comp - direct) / std::abs(direct);
    bool pass = rel < tol;
    json slices = json::array();
    std::vector<double> ns{2, 3, 4};
    if (root.contains("slices"))
        ns = doc.vector(root, "slices");
    auto rq = qgerbe::rotated_quadrature();
    rq.nodes = quad.nodes;
    for (double n : ns) {
        if (n < 2 || n != std::floor(n))
            doc.fail("slices", "slice counts must be integers >= 2");
        const qgerbe::cplx ts = qgerbe::timeslice_propagator(k, a, b, static_cast<std::size_t>(n), rq);
        const double e = std::abs(ts - direct) / std::abs(direct);
        pass = pass && e < tol;
        slices.push_back({{"N", static_cast<int>(n)}, {"value", complex_json(ts)}, {"rel_error", e}});
    }
    emit(o, "compose.json",
         dump({{"direct", complex_json(direct)},
               {"composed", complex_json(comp)},
               {"rel_error", rel},
               {"timeslice", slices},
               {"tol", tol},
               {"pass", pass}}));
    return pass ? 0 : 1;
}

std::map<std::string, double> parse_params(const std::string& s)
{
    std::map<std::string, double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw InputError("--params entries look like key=value, got \"" + item + "\"");
        try {
            std::size_t used = 0;
            const std::string v = item.substr(eq + 1);
            out[item.substr(0, eq)] = std::stod(v, &used);
            if (used != v.size())
                throw std::invalid_argument(v);
        } catch (const std::logic_error&) {
            throw InputError("--params value for \"" + item.substr(0, eq) + "\" is not a number");
        }
    }
    return out;
}

int cmd_trivialise(const Options& o)
{
    qgerbe::TrivParams tp;
    double lo = -2, hi = 2;
    long n = 21;
    std::optional<qgerbe::io::Document> doc;
    double tol = 1e-5;
    if (!o.scenario.empty()) {
        doc = load(o);
        const json& root = doc->root();
        tp.kernel = qgerbe::io::kernel(*doc, doc->need(root, "kernel"));
        tp.t1 = doc->number(root, "t1");
        tp.t12 = doc->number(root, "t12");
        tp.t2 = doc->number(root, "t2");
        const json& g = doc->need(root, "q12_grid");
        lo = doc->number(g, "lo");
        hi = doc->number(g, "hi");
        n = doc->integer(g, "n", 21);
        tol = doc->number(root, "tol", tol);
    } else {
        if (o.kind.empty())
            throw InputError("trivialise needs --scenario or --kind/--params");
        auto p = parse_params(o.params);
        auto get = [&](const char* key, double fallback) { return p.count(key) ? p.at(key) : fallback; };
        const int d = static_cast<int>(get("d", 1));
        if (o.kind == "free")
            tp.kernel = qgerbe::KernelParams::free_particle(get("m", 1), get("hbar", 1), d);
        else if (o.kind == "linear")
            tp.kernel = qgerbe::KernelParams::linear(get("m", 1), get("hbar", 1), {get("F", 1)}, d);
        else if (o.kind == "harmonic")
            tp.kernel = qgerbe::KernelParams::harmonic(get("m", 1), get("hbar", 1), get("omega", 1), d);
        else
            throw InputError("--kind must be free, linear or harmonic");
        tp.t1 = get("t1", 0.0);
        tp.t12 = get("t12", 0.5);
        tp.t2 = get("t2", 1.0);
        if (!o.grid.empty()) {
            double a = 0, b = 0;
            long c = 0;
            char tail = 0;
            if (std::sscanf(o.grid.c_str(), "%lf:%lf:%ld%c", &a, &b, &c, &tail) != 3)
                throw InputError("--q12-grid must look like lo:hi:n");
            lo = a;
            hi = b;
            n = c;
        }
    }
    if (n < 2)
        throw InputError("the q12 grid needs at least two points");
    tol = o.tol.value_or(tol);
    const auto quad = quad_for(o, doc ? &*doc : nullptr);
    tp.validate();
    auto point = [&](double x) {
        std::vector<double> q(static_cast<std::size_t>(tp.kernel.dim), 0.0);
        q[0] = x;
        return q;
    };
    const qgerbe::cplx n0 = qgerbe::tau_numeric(tp, point(lo), quad).tau.value();
    const qgerbe::cplx c0 = qgerbe::tau_closed(tp, point(lo)).tau.value();
    std::string csv = "q12,phase_closed,phase_numeric,abs_error\n";
    double worst = 0.0;
    for (long i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        const qgerbe::cplx c = qgerbe::tau_closed(tp, point(x)).tau.value();
        // numeric phase aligned to the closed form at the first grid point
        const qgerbe::cplx num = qgerbe::tau_numeric(tp, point(x), quad).tau.value() * std::conj(n0) * c0;
        const double err = std::abs(qgerbe::phase_gap(num, c));
        worst = std::max(worst, err);
        char line[160];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.6e\n", x, std::arg(c), std::arg(num), err);
        csv += line;
    }
    emit(o, "trivialise.csv", csv);
    return worst < tol ? 0 : 1;
}

int cmd_cocycle(const Options& o)
{
    const auto doc = load(o);
    qgerbe::LoopSpec loop = qgerbe::io::loop(doc, doc.root());
    const bool extremize = doc.boolean(doc.root(), "extremize", false);
    if (extremize)
        loop = qgerbe::extremize_anchors(loop);
    const auto a = qgerbe::loop_action(loop);
    json out = {{"S_loop", a.S_loop},
                {"phase", a.g.phase()},
                {"g", complex_json(a.g.value())},
                {"per_segment_actions", a.segment_actions}};
    if (extremize)
        out["anchors"] = loop.anchors;
    if (doc.boolean(doc.root(), "g_tilde", false)) {
        const auto& t = loop.times;
        const std::array<qgerbe::TrivParams, 3> tp{qgerbe::TrivParams{loop.kernel, t[0], t[1], t[2]},
                                                    qgerbe::TrivParams{loop.kernel, t[3], t[4], t[5]},
                                                    qgerbe::TrivParams{loop.kernel, t[6], t[7], t[8]}};
        const auto g = qgerbe::g_tilde_numeric(tp, loop.midpoint, quad_for(o, &doc));
        out["g_tilde"] = {{"phase", g.phase.phase()}, {"modulus", std::abs(g.value)}};
    }
    emit(o, "cocycle.json", dump(out));
    return 0;
}

int cmd_connection(const Options& o)
{
    const auto doc = load(o);
    const json& root = doc.root();
    const std::string preset = doc.string(root, "preset", "smooth");
    qgerbe::ConnectionFields f;
    if (preset == "smooth")
        f = qgerbe::ConnectionFields::smooth();
    else if (preset == "flat")
        f = qgerbe::ConnectionFields::flat();
    else
        doc.fail("preset", "preset must be \"smooth\" or \"flat\"");
    const long n = doc.integer(root, "n", 4);
    if (n < 1)
        doc.fail("n", "\"n\" must be at least 1");
    auto data = qgerbe::sample_connection(f, qgerbe::box_volume(static_cast<std::size_t>(n)));
    const double perturb = doc.number(root, "perturb", 0.0);
    if (perturb != 0.0)
        qgerbe::perturb_connection(data, perturb);
    const double tol = o.tol.value_or(doc.number(root, "tol", 1e-6));
    const auto r = qgerbe::verify_connection(data, tol);
    emit(o, "connection.json",
         dump({{"preset", preset},
               {"n", n},
               {"perturb", perturb},
               {"equations", {"H = dB", "B_b - B_a = dA_ab", "A_12 + A_23 + A_31 = g^-1 dg"}},
               {"max_residual", r.max_residual},
               {"max_density", r.max_density},
               {"checked", r.checked},
               {"tol", tol},
               {"pass", r.pass}}));
    return r.pass ? 0 : 1;
}

int cmd_stokes(const Options& o)
{
    const auto doc = load(o);
    const json& root = doc.root();
    const auto L = qgerbe::io::polynomial_lagrangian(doc, doc.need(root, "lagrangian"));
    const json& sobj = doc.need(root, "surface");
    const double tol = o.tol.value_or(doc.number(root, "tol", 1e-9));
    json out;
    bool pass = false;
    if (root.contains("refine")) {
        json s = sobj;
        std::vector<double> hs, errs;
        json rows = json::array();
        for (double n : doc.vector(root, "refine")) {
            if (n < 1 || n != std::floor(n))
                doc.fail("refine", "refinement levels must be positive integers");
            s["n"] = static_cast<long>(n);
            const auto r = qgerbe::stokes_check(L, qgerbe::io::surface(doc, s), tol);
            hs.push_back(1.0 / n);
            errs.push_back(r.residual);
            rows.push_back({{"n", static_cast<long>(n)}, {"line", r.line}, {"surface", r.surface}, {"residual", r.residual}});
        }
        const double slope = qgerbe::convergence_slope(hs, errs);
        const double lo = doc.number(root, "slope_min", 1.8), hi = doc.number(root, "slope_max", 2.2);
        pass = slope >= lo && slope <= hi;
        out = {{"refinements", rows}, {"slope", slope}, {"slope_range", {lo, hi}}, {"pass", pass}};
    } else {
        const auto r = qgerbe::stokes_check(L, qgerbe::io::surface(doc, sobj), tol);
        pass = r.pass;
        out = {{"line", r.line}, {"surface", r.surface}, {"residual", r.residual}, {"closed", r.closed},
               {"tol", tol},    {"pass", r.pass}};
    }
    emit(o, "stokes.json", dump(out));
    return pass ? 0 : 1;
}

json report_json(const qgerbe::QuantizationReport& r)
{
    return {{"value", r.value}, {"normalized", r.normalized}, {"n", r.n},
            {"deviation", r.deviation}, {"pass", r.pass}, {"parity", r.even ? "even" : "odd"}};
}

int cmd_charclass(const Options& o)
{
    const auto doc = load(o);
    const json& root = doc.root();
    const std::string mode = doc.string(root, "mode");
    const double two_pi = 2.0 * std::numbers::pi;
    json out;
    bool pass = false;
    if (mode == "closed") {
        const auto vol = qgerbe::io::volume(doc, doc.need(root, "volume"));
        const double total = root.contains("planted_total") ? doc.number(root, "planted_total")
                                                            : two_pi * doc.number(root, "planted_n");
        const auto r = qgerbe::integrate_H_closed_volume(qgerbe::planted_H(vol, total), vol, o.tol.value_or(1e-6));
        out = report_json(r);
        pass = r.pass;
    } else if (mode == "gauss") {
        const auto vol = qgerbe::io::volume(doc, doc.need(root, "volume"));
        const double hbar = doc.number(root, "hbar", 1.0);
        const auto H = qgerbe::planted_H(vol, doc.number(root, "H_total", 0.0));
        qgerbe::FluxSource flux = qgerbe::Cochain{};
        if (root.contains("lagrangian"))
            flux = qgerbe::io::polynomial_lagrangian(doc, root.at("lagrangian"));
        else
            flux = qgerbe::planted_flux(vol.boundary_surface(), doc.number(root, "flux_total"));
        const auto r = qgerbe::gauss_law_check(flux, H, vol, hbar, o.tol.value_or(1e-6));
        out = {{"volume_side", r.volume_side}, {"surface_side", r.surface_side}, {"residual", r.residual}, {"pass", r.pass}};
        pass = r.pass;
    } else if (mode == "gluing") {
        const auto vol = qgerbe::io::volume(doc, doc.need(root, "volume"));
        const std::size_t half = vol.tets.size() / 2;
        const auto v1 = vol.slice(0, half);
        auto v2 = vol.slice(half, vol.tets.size());
        if (doc.boolean(root, "flip_second", false))
            v2 = v2.reversed();
        const double hbar = doc.number(root, "hbar", 1.0);
        auto H = qgerbe::planted_H(v1, two_pi * doc.number(root, "n1"));
        for (const auto& [s, v] : qgerbe::planted_H(v2, two_pi * doc.number(root, "n2")))
            H[s] += v;
        const auto flux = qgerbe::planted_flux(v1.boundary_surface(), std::numbers::pi * hbar * doc.number(root, "flux_n"));
        const auto r = qgerbe::gluing_check(flux, H, v1, v2, hbar, o.tol.value_or(1e-6));
        out = {{"surface", report_json(r.surface)}, {"volume", report_json(r.volume)}, {"equivalent", r.equivalent}};
        pass = r.equivalent;
    } else if (mode == "integer") {
        const auto r = qgerbe::cocycle_integer_form(qgerbe::U1Value::from_phase(doc.number(root, "phase")),
                                                    doc.integer(root, "winding", 0), o.tol.value_or(1e-6));
        out = report_json(r);
        pass = r.pass;
    } else {
        doc.fail("mode", "mode must be closed, gauss, gluing or integer");
    }
    out["mode"] = mode;
    emit(o, "charclass.json", dump(out));
    return pass ? 0 : 1;
}

int cmd_verify(const Options& o)
{
    std::vector<qgerbe::verify::Result> results;
    const auto checks = qgerbe::verify::all_checks();
    std::string suite = o.suite;
    for (auto& c : suite)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (suite == "all") {
        for (const auto& c : checks)
            results.push_back(c(o.seed));
    } else if (suite.size() == 3 && suite.rfind("ac", 0) == 0 && suite[2] >= '1' && suite[2] <= '9') {
        results.push_back(checks[static_cast<std::size_t>(suite[2] - '1')](o.seed));
    } else {
        throw InputError("--suite must be all or AC1..AC9");
    }
    bool all = true;
    json arr = json::array();
    for (const auto& r : results) {
        std::cerr << qgerbe::verify::format_line(r) << "\n";
        all = all && r.pass;
        arr.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}});
    }
    emit(o, "verify.json", dump({{"seed", o.seed}, {"results", arr}, {"pass", all}}));
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantum-mechanical U(1) gerbe toolkit"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--scenario", o.scenario, "scenario JSON file");
        sub->add_option("--out", o.out, "output directory (default: stdout)");
        sub->add_option("--seed", o.seed, "random seed");
        sub->add_option("--tol", o.tol, "check tolerance");
        sub->add_option("--quad-nodes", o.quad_nodes, "fixed quadrature nodes per variable");
        sub->add_option("--eps", o.eps, "smallest damping of a halving five-step ladder")->check(CLI::PositiveNumber);
        return sub;
    };

    std::map<CLI::App*, int (*)(const Options&)> handlers;
    handlers[common(app.add_subcommand("propagator", "evaluate G at pairs of events"))] = cmd_propagator;
    handlers[common(app.add_subcommand("compose", "semigroup and time-slicing check"))] = cmd_compose;
    auto* triv = common(app.add_subcommand("trivialise", "closed vs numeric trivialisation table (CSV)"));
    triv->add_option("--kind", o.kind, "free | linear | harmonic");
    triv->add_option("--params", o.params, "m=..,hbar=..,F=..,omega=..,t1=..,t12=..,t2=..,d=..");
    triv->add_option("--q12-grid", o.grid, "lo:hi:n");
    handlers[triv] = cmd_trivialise;
    handlers[common(app.add_subcommand("cocycle", "steepest-descent cocycle of a loop"))] = cmd_cocycle;
    handlers[common(app.add_subcommand("connection", "connection structure equations"))] = cmd_connection;
    handlers[common(app.add_subcommand("stokes", "Stokes residual and convergence"))] = cmd_stokes;
    handlers[common(app.add_subcommand("charclass", "quantization reports"))] = cmd_charclass;
    auto* ver = common(app.add_subcommand("verify", "run acceptance checks"));
    ver->add_option("--suite", o.suite, "all | AC1..AC9");
    handlers[ver] = cmd_verify;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        for (auto& [sub, fn] : handlers)
            if (sub->parsed())
                return fn(o);
    } catch (const qgerbe::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const qgerbe::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
