#include "miura/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace miura::io {

std::string format17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

json label_to_json(const Label& label) {
    switch (label.kind) {
    case Label::Kind::square_well:
        return json{{"kind", "square_well"}, {"a_half", label.p1}, {"b_param", label.p2}};
    case Label::Kind::delta: return json{{"kind", "delta"}, {"lambda", label.p1}};
    case Label::Kind::constant: return json{{"kind", "constant"}, {"c", label.p1}};
    case Label::Kind::image_of: return json{{"kind", "image_of"}};
    default: return json("none");
    }
}

Label label_from_json(const json& j) {
    Label label;
    if (j.is_null() || (j.is_string() && j.get<std::string>() == "none")) return label;
    if (!j.is_object() || !j.contains("kind"))
        throw ValidationError("potential json: label must be \"none\" or an object with kind");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "square_well") {
        label.kind = Label::Kind::square_well;
        label.p1 = j.value("a_half", 0.0);
        label.p2 = j.value("b_param", 0.0);
    } else if (kind == "delta") {
        label.kind = Label::Kind::delta;
        label.p1 = j.value("lambda", 0.0);
    } else if (kind == "constant") {
        label.kind = Label::Kind::constant;
        label.p1 = j.value("c", 0.0);
    } else if (kind == "image_of") {
        label.kind = Label::Kind::image_of;
    } else if (kind != "none") {
        throw ValidationError("potential json: unknown label kind '" + kind + "'");
    }
    return label;
}

std::vector<double> doubles_from_json(const json& j, const std::string& field, size_t expect) {
    if (!j.is_array()) throw ValidationError("potential json: " + field + " must be an array");
    if (j.size() != expect) {
        std::ostringstream os;
        os << "potential json: " << field << " must have " << expect << " entries, got " << j.size();
        throw ValidationError(os.str());
    }
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw ValidationError("potential json: " + field + " holds a non-number");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

json potential_to_json(const Potential& q) {
    json j;
    j["grid"] = {{"a", q.grid.a}, {"b", q.grid.b}, {"n", q.grid.n}};
    j["f"] = q.f.values;
    j["g"] = q.g.values;
    json atoms = json::array();
    for (const Atom& at : q.atoms) atoms.push_back({{"x", at.x}, {"w", at.w}});
    j["atoms"] = std::move(atoms);
    j["label"] = label_to_json(q.label);
    return j;
}

Potential potential_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("potential json: document must be an object");
    for (const char* field : {"grid", "f", "g", "atoms"})
        if (!j.contains(field))
            throw ValidationError(std::string("potential json: missing field '") + field + "'");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key != "grid" && key != "f" && key != "g" && key != "atoms" && key != "label")
            throw ValidationError("potential json: unknown field '" + key + "'");
    }
    const json& gj = j.at("grid");
    for (const char* field : {"a", "b", "n"})
        if (!gj.contains(field))
            throw ValidationError(std::string("potential json: missing field 'grid.") + field + "'");
    Grid grid(gj.at("a").get<double>(), gj.at("b").get<double>(), gj.at("n").get<int>());
    const size_t m = static_cast<size_t>(grid.n + 1);
    GridFn f(grid, doubles_from_json(j.at("f"), "f", m));
    GridFn g(grid, doubles_from_json(j.at("g"), "g", m));
    std::vector<Atom> atoms;
    const json& aj = j.at("atoms");
    if (!aj.is_array()) throw ValidationError("potential json: atoms must be an array");
    const double tol = grid.h() / 10.0;
    for (size_t i = 0; i < aj.size(); ++i) {
        const json& a = aj[i];
        if (!a.is_object() || !a.contains("x") || !a.contains("w")) {
            std::ostringstream os;
            os << "potential json: atoms[" << i << "] must be {x, w}";
            throw ValidationError(os.str());
        }
        const double x = a.at("x").get<double>();
        if (grid.node_index(x, tol) < 0) {
            std::ostringstream os;
            os << "potential json: atoms[" << i << "].x = " << x
               << " is farther than h/10 from every grid node";
            throw ValidationError(os.str());
        }
        atoms.push_back(Atom{x, a.at("w").get<double>()});
    }
    return Potential(grid, std::move(f), std::move(g), std::move(atoms),
                     label_from_json(j.contains("label") ? j.at("label") : json("none")));
}

Potential read_potential(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("cannot parse " + path + ": " + e.what());
    }
    return potential_from_json(j);
}

void write_potential(const std::string& path, const Potential& q) {
    write_text(path, potential_to_json(q).dump(2) + "\n");
}

json spectral_report_to_json(const SpectralReport& rep) {
    json j;
    j["L_values"] = rep.L_values;
    j["lambda0_of_L"] = rep.lambda0_of_L;
    j["lambda0_estimate"] = rep.lambda0_estimate;
    j["tail_extrapolation"] = rep.tail_extrapolation;
    j["verdict"] = to_string(rep.nonneg);
    if (rep.witness_interval)
        j["witness"] = {{"interval", {rep.witness_interval->first, rep.witness_interval->second}},
                        {"lambda0", rep.witness_lambda0.value_or(0.0)}};
    return j;
}

json positivity_to_json(const PositivityResult& res) {
    json j;
    j["verdict"] = to_string(res.verdict);
    j["tested_halfwidth"] = res.tested_halfwidth;
    if (res.witness_interval)
        j["witness_interval"] = {res.witness_interval->first, res.witness_interval->second};
    return j;
}

namespace {

json tail_to_json(const TailResult& t) {
    json j;
    j["flag"] = to_string(t.flag);
    if (t.limit)
        j["limit"] = *t.limit;
    else
        j["limit"] = nullptr;
    j["increments"] = t.increments;
    return j;
}

} // namespace

json fiber_report_to_json(const FiberReport& rep) {
    json j;
    j["fiber_class"] = to_string(rep.fiber_class);
    j["lambda0_class"] = to_string(rep.lambda0_class);
    j["m_plus"] = tail_to_json(rep.m_plus);
    j["m_minus"] = tail_to_json(rep.m_minus);
    j["spectral"] = spectral_report_to_json(rep.spectral);
    j["truncation"] = {{"grid", {{"a", rep.q.grid.a}, {"b", rep.q.grid.b}, {"n", rep.q.grid.n}}},
                       {"c_schedule", rep.y_plus.schedule},
                       {"rtol", rep.y_plus.rtol},
                       {"achieved_diff_plus", rep.y_plus.achieved_diff},
                       {"achieved_diff_minus", rep.y_minus.achieved_diff}};
    return j;
}

json fiber_norms_to_json(const FiberNorms& norms) {
    json rows = json::array();
    for (auto [theta, nsq] : norms.norm_sq) rows.push_back({{"theta", theta}, {"norm_sq", nsq}});
    return json{{"norms", std::move(rows)},
                {"special_integral", norms.special_integral_value},
                {"special_integral_exists", norms.special_integral_exists}};
}

std::string spectral_report_csv(const SpectralReport& rep) {
    std::string out = "L,lambda0\n";
    for (size_t i = 0; i < rep.L_values.size(); ++i)
        out += format17(rep.L_values[i]) + "," + format17(rep.lambda0_of_L[i]) + "\n";
    return out;
}

std::string fiber_endpoints_csv(const FiberReport& rep) {
    std::string out = "x,r_plus,r_minus\n";
    const Grid& g = rep.q.grid;
    for (int k = 0; k <= g.n; ++k)
        out += format17(g.node(k)) + "," + format17(rep.r_plus[k]) + "," + format17(rep.r_minus[k]) + "\n";
    return out;
}

std::string trace_csv(const EvolutionTrace& trace) {
    std::string out = "time,l2_v,special_integral_u,mass_v\n";
    for (const auto& row : trace.invariants)
        out += format17(row.time) + "," + format17(std::sqrt(row.l2sq_v)) + "," +
               format17(row.special_u) + "," + format17(row.mass_v) + "\n";
    return out;
}

json trace_frames_to_json(const EvolutionTrace& trace) {
    json j;
    j["period"] = trace.grid.b - trace.grid.a;
    j["modes"] = trace.grid.n;
    j["dt"] = trace.dt_used;
    j["steps"] = trace.steps;
    j["edge_max_abs"] = trace.edge_max_abs;
    j["edge_ok"] = trace.edge_ok;
    j["times"] = trace.times;
    j["v_frames"] = trace.v_frames;
    j["u_frames"] = trace.u_frames;
    return j;
}

std::string green_csv(const GreenKernel& K) {
    const Grid& g = K.grid;
    std::string out = "x\\y";
    for (int j = 0; j <= g.n; ++j) out += "," + format17(g.node(j));
    out += "\n";
    for (int i = 0; i <= g.n; ++i) {
        out += format17(g.node(i));
        for (int j = 0; j <= g.n; ++j) out += "," + format17(K(i, j));
        out += "\n";
    }
    return out;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << content;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace miura::io
