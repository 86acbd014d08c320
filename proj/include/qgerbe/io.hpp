// JSON scenario parsing (needs nlohmann/json). Schema violations raise
// SchemaError with a "line N:" prefix pointing into the scenario text.
#pragma once

#include <qgerbe/cech.hpp>
#include <qgerbe/cocycle.hpp>
#include <qgerbe/cover.hpp>
#include <qgerbe/errors.hpp>
#include <qgerbe/geometry.hpp>
#include <qgerbe/kernels.hpp>
#include <qgerbe/mesh.hpp>
#include <qgerbe/quadrature.hpp>
#include <qgerbe/trivialisation.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace qgerbe::io {

using json = nlohmann::json;

class Document {
public:
    static Document from_text(std::string text)
    {
        Document d;
        d.text_ = std::move(text);
        try {
            d.root_ = json::parse(d.text_);
        } catch (const json::parse_error& e) {
            throw SchemaError("line " + std::to_string(d.line_at(e.byte)) + ": malformed JSON (" + e.what() + ")");
        }
        if (!d.root_.is_object())
            throw SchemaError("line 1: scenario must be a JSON object");
        return d;
    }

    static Document from_file(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw SchemaError("line 0: cannot open scenario file " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return from_text(ss.str());
    }

    const json& root() const { return root_; }

    /// Line of the first occurrence of "key" in the text (1 when absent).
    std::size_t line_of(const std::string& key) const
    {
        const auto pos = text_.find("\"" + key + "\"");
        return pos == std::string::npos ? 1 : line_at(pos + 1);
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const
    {
        throw SchemaError("line " + std::to_string(line_of(key)) + ": " + msg);
    }

    const json& need(const json& obj, const std::string& key) const
    {
        if (!obj.is_object() || !obj.contains(key))
            fail(key, "missing required key \"" + key + "\"");
        return obj.at(key);
    }

    double number(const json& obj, const std::string& key) const
    {
        const json& v = need(obj, key);
        if (!v.is_number())
            fail(key, "\"" + key + "\" must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x))
            fail(key, "\"" + key + "\" must be finite");
        return x;
    }

    double number(const json& obj, const std::string& key, double fallback) const
    {
        return obj.contains(key) ? number(obj, key) : fallback;
    }

    long integer(const json& obj, const std::string& key, long fallback) const
    {
        if (!obj.contains(key))
            return fallback;
        const json& v = obj.at(key);
        if (!v.is_number_integer())
            fail(key, "\"" + key + "\" must be an integer");
        return v.get<long>();
    }

    std::string string(const json& obj, const std::string& key) const
    {
        const json& v = need(obj, key);
        if (!v.is_string())
            fail(key, "\"" + key + "\" must be a string");
        return v.get<std::string>();
    }

    std::string string(const json& obj, const std::string& key, const std::string& fallback) const
    {
        return obj.contains(key) ? string(obj, key) : fallback;
    }

    bool boolean(const json& obj, const std::string& key, bool fallback) const
    {
        if (!obj.contains(key))
            return fallback;
        if (!obj.at(key).is_boolean())
            fail(key, "\"" + key + "\" must be true or false");
        return obj.at(key).get<bool>();
    }

    std::vector<double> vector(const json& obj, const std::string& key) const
    {
        const json& v = need(obj, key);
        if (v.is_number())
            return {number(obj, key)};
        if (!v.is_array())
            fail(key, "\"" + key + "\" must be a number or an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number())
                fail(key, "\"" + key + "\" must contain only numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

private:
    std::size_t line_at(std::size_t byte) const
    {
        std::size_t line = 1;
        for (std::size_t i = 0; i + 1 < byte && i < text_.size(); ++i)
            if (text_[i] == '\n')
                ++line;
        return line;
    }

    std::string text_;
    json root_;
};

/// {"kind": "free"|"linear"|"harmonic", "m", "hbar", "d", "F", "omega"}
inline KernelParams kernel(const Document& doc, const json& obj)
{
    const std::string kind = doc.string(obj, "kind");
    const double m = doc.number(obj, "m", 1.0);
    const double hbar = doc.number(obj, "hbar", 1.0);
    const long d = doc.integer(obj, "d", 1);
    if (d < 1)
        doc.fail("d", "\"d\" must be at least 1");
    try {
        if (kind == "free")
            return KernelParams::free_particle(m, hbar, static_cast<int>(d));
        if (kind == "linear")
            return KernelParams::linear(m, hbar, doc.vector(obj, "F"), static_cast<int>(d));
        if (kind == "harmonic")
            return KernelParams::harmonic(m, hbar, doc.number(obj, "omega"), static_cast<int>(d));
    } catch (const DomainError& e) {
        doc.fail("kind", std::string("invalid kernel: ") + e.what());
    }
    doc.fail("kind", "unknown kernel kind \"" + kind + "\"");
}

/// Optional {"method": "damped"|"rotated", "eps": [...], "nodes": n}
inline QuadratureSpec quadrature(const Document& doc, const json& root)
{
    QuadratureSpec q;
    if (!root.contains("quadrature"))
        return q;
    const json& obj = root.at("quadrature");
    const std::string method = doc.string(obj, "method", "damped");
    if (method == "rotated")
        q.method = Regularization::rotated;
    else if (method != "damped")
        doc.fail("method", "quadrature method must be \"damped\" or \"rotated\"");
    if (obj.contains("eps"))
        q.eps = doc.vector(obj, "eps");
    const long nodes = doc.integer(obj, "nodes", 0);
    if (nodes < 0)
        doc.fail("nodes", "\"nodes\" must be nonnegative");
    q.nodes = static_cast<std::size_t>(nodes);
    return q;
}

inline SpacetimePoint event(const Document& doc, const json& obj, const std::string& key)
{
    const json& e = doc.need(obj, key);
    return {doc.vector(e, "q"), doc.number(e, "t")};
}

/// {"kernel", "anchors": [q1, q2, q3], "midpoint": q, "times": [9 numbers]}
inline LoopSpec loop(const Document& doc, const json& root)
{
    LoopSpec l;
    l.kernel = kernel(doc, doc.need(root, "kernel"));
    const json& anchors = doc.need(root, "anchors");
    if (!anchors.is_array() || anchors.size() != 3)
        doc.fail("anchors", "\"anchors\" must list three positions");
    for (std::size_t i = 0; i < 3; ++i) {
        json wrap = {{"anchors", anchors[i]}};
        l.anchors[i] = doc.vector(wrap, "anchors");
    }
    l.midpoint = doc.vector(root, "midpoint");
    const auto t = doc.vector(root, "times");
    if (t.size() != 9)
        doc.fail("times", "\"times\" must list nine event times");
    std::copy(t.begin(), t.end(), l.times.begin());
    try {
        l.validate();
    } catch (const Error& e) {
        doc.fail("times", std::string("invalid loop: ") + e.what());
    }
    return l;
}

/// Polynomial L(q, t) = sum_k c_k prod_j q_j^{a_kj} t^{b_k}:
/// {"terms": [{"c": 1, "q": [2], "t": 0}, ...]}
inline LagrangianField polynomial_lagrangian(const Document& doc, const json& obj)
{
    struct Term {
        double c;
        std::vector<int> q;
        int t;
    };
    std::vector<Term> terms;
    const json& arr = doc.need(obj, "terms");
    if (!arr.is_array() || arr.empty())
        doc.fail("terms", "\"terms\" must be a nonempty array");
    for (const auto& term : arr) {
        Term t{doc.number(term, "c"), {}, static_cast<int>(doc.integer(term, "t", 0))};
        if (term.contains("q"))
            for (double p : doc.vector(term, "q")) {
                if (p < 0 || p != std::floor(p))
                    doc.fail("q", "exponents must be nonnegative integers");
                t.q.push_back(static_cast<int>(p));
            }
        if (t.t < 0)
            doc.fail("t", "exponents must be nonnegative integers");
        terms.push_back(std::move(t));
    }
    auto pw = [](double x, int n) { return n == 0 ? 1.0 : std::pow(x, n); };
    LagrangianField L;
    L.value = [terms, pw](const std::vector<double>& q, double t) {
        double s = 0.0;
        for (const auto& term : terms) {
            double v = term.c * pw(t, term.t);
            for (std::size_t j = 0; j < term.q.size(); ++j)
                v *= pw(j < q.size() ? q[j] : 0.0, term.q[j]);
            s += v;
        }
        return s;
    };
    L.gradient = [terms, pw](const std::vector<double>& q, double t) {
        std::vector<double> g(q.size(), 0.0);
        for (const auto& term : terms)
            for (std::size_t j = 0; j < term.q.size() && j < q.size(); ++j) {
                if (term.q[j] == 0)
                    continue;
                double v = term.c * pw(t, term.t) * term.q[j] * pw(q[j], term.q[j] - 1);
                for (std::size_t k = 0; k < term.q.size(); ++k)
                    if (k != j)
                        v *= pw(k < q.size() ? q[k] : 0.0, term.q[k]);
                g[j] += v;
            }
        return g;
    };
    return L;
}

/// {"type": "square", "n", "side", "angle", "center"} or
/// {"vertices": [[q..., t], ...], "triangles": [[a, b, c], ...]}
inline DiscreteSurface surface(const Document& doc, const json& obj)
{
    if (obj.contains("vertices")) {
        DiscreteSurface s;
        for (const auto& v : doc.need(obj, "vertices")) {
            json wrap = {{"vertices", v}};
            s.vertices.push_back(doc.vector(wrap, "vertices"));
        }
        for (const auto& t : doc.need(obj, "triangles")) {
            if (!t.is_array() || t.size() != 3)
                doc.fail("triangles", "each triangle lists three vertex indices");
            std::array<std::size_t, 3> tri{};
            for (std::size_t i = 0; i < 3; ++i) {
                if (!t[i].is_number_unsigned())
                    doc.fail("triangles", "vertex indices must be nonnegative integers");
                tri[i] = t[i].get<std::size_t>();
            }
            s.triangles.push_back(tri);
        }
        try {
            s.validate();
        } catch (const Error& e) {
            doc.fail("triangles", std::string("invalid surface: ") + e.what());
        }
        return s;
    }
    const std::string type = doc.string(obj, "type");
    if (type != "square")
        doc.fail("type", "surface type must be \"square\" or explicit vertices/triangles");
    const long n = doc.integer(obj, "n", 4);
    if (n < 1)
        doc.fail("n", "\"n\" must be at least 1");
    Point center{0.0, 0.0};
    if (obj.contains("center")) {
        center = doc.vector(obj, "center");
        if (center.size() != 2)
            doc.fail("center", "\"center\" must have two entries");
    }
    return square_surface(static_cast<std::size_t>(n), doc.number(obj, "side", 1.0), doc.number(obj, "angle", 0.0),
                          center);
}

/// {"type": "box"|"torus", "n"}
inline DiscreteVolume volume(const Document& doc, const json& obj)
{
    const std::string type = doc.string(obj, "type");
    const long n = doc.integer(obj, "n", 4);
    if (n < 1)
        doc.fail("n", "\"n\" must be at least 1");
    if (type == "box")
        return box_volume(static_cast<std::size_t>(n));
    if (type == "torus") {
        if (n < 3)
            doc.fail("n", "a torus mesh needs n >= 3");
        return torus_volume(static_cast<std::size_t>(n));
    }
    doc.fail("type", "volume type must be \"box\" or \"torus\"");
}

/// {"d": int, "charts": [{"index": int, "lo": [...], "hi": [...]}]}
inline Cover cover(const Document& doc, const json& obj)
{
    const long d = doc.integer(obj, "d", 0);
    if (d < 1)
        doc.fail("d", "cover needs \"d\" >= 1");
    const json& charts = doc.need(obj, "charts");
    if (!charts.is_array() || charts.empty())
        doc.fail("charts", "\"charts\" must be a nonempty array");
    std::vector<Chart> out;
    for (const auto& c : charts) {
        const long index = doc.integer(c, "index", -1);
        if (!c.contains("index"))
            doc.fail("index", "each chart needs an integer \"index\"");
        out.push_back({static_cast<int>(index), doc.vector(c, "lo"), doc.vector(c, "hi")});
    }
    try {
        return Cover(static_cast<int>(d), std::move(out));
    } catch (const Error& e) {
        doc.fail("charts", std::string("invalid cover: ") + e.what());
    }
}

inline json to_json(const Cover& c)
{
    json charts = json::array();
    for (const auto& ch : c.charts())
        charts.push_back({{"index", ch.index}, {"lo", ch.lo}, {"hi", ch.hi}});
    return {{"d", c.dimension()}, {"charts", charts}};
}

inline json to_json(const KernelParams& k)
{
    json j = {{"kind", to_string(k.kind)}, {"m", k.mass}, {"hbar", k.hbar}, {"d", k.dim}};
    if (k.kind == KernelKind::linear)
        j["F"] = k.force;
    if (k.kind == KernelKind::harmonic)
        j["omega"] = k.omega;
    return j;
}

/// One row {"indices", "point", "re", "im"} per stored value, sorted order.
inline json to_rows(const U1Cochain& c)
{
    json rows = json::array();
    for (const auto& [labels, pts] : c.data())
        for (const auto& [p, v] : pts)
            rows.push_back({{"indices", labels}, {"point", p}, {"re", v.value().real()}, {"im", v.value().imag()}});
    return rows;
}

inline U1Cochain from_rows(const Document& doc, const json& rows, const Cover& cover, int degree)
{
    if (!rows.is_array())
        doc.fail("indices", "cochain rows must be an array");
    U1Cochain c(cover, degree);
    for (const auto& r : rows) {
        Labels labels;
        for (double x : doc.vector(r, "indices"))
            labels.push_back(static_cast<int>(x));
        try {
            c.set(labels, doc.vector(r, "point"), U1Value(cplx{doc.number(r, "re"), doc.number(r, "im")}));
        } catch (const Error& e) {
            doc.fail("indices", std::string("invalid cochain row: ") + e.what());
        }
    }
    return c;
}

} // namespace qgerbe::io
