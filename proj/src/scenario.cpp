#include "lyo/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "lyo/errors.hpp"

namespace lyo {

using nlohmann::json;

const char* stage_key(Stage s) {
    switch (s) {
        case Stage::Freezing: return "freezing";
        case Stage::PrimaryDrying: return "primary_drying";
        case Stage::SecondaryDrying: return "secondary_drying";
    }
    return "unknown";
}

bool Scenario::has_stage(Stage s) const {
    return std::find(stages.begin(), stages.end(), s) != stages.end();
}

namespace {

// One JSON object being read. Tracks which keys were consumed so leftovers
// can be reported, and mirrors each value into the effective-parameter log.
class Section {
public:
    Section(const json* node, std::string path, json& effective)
        : node_(node), path_(std::move(path)), eff_(effective) {
        if (node_ && !node_->is_object()) fail("", "must be an object");
        if (!eff_.is_object()) eff_ = json::object();
    }

    bool has(const std::string& key) const { return node_ && node_->contains(key); }

    double number(const std::string& key, double def) {
        double v = def;
        if (const json* j = take(key)) {
            if (!j->is_number()) fail(key, "must be a number");
            v = j->get<double>();
            if (!std::isfinite(v)) fail(key, "must be finite");
        }
        eff_[key] = v;
        return v;
    }

    std::optional<double> optional_number(const std::string& key) {
        const json* j = take(key);
        if (!j) return std::nullopt;
        if (!j->is_number()) fail(key, "must be a number");
        const double v = j->get<double>();
        if (!std::isfinite(v)) fail(key, "must be finite");
        eff_[key] = v;
        return v;
    }

    std::size_t count(const std::string& key, std::size_t def) {
        std::size_t v = def;
        if (const json* j = take(key)) {
            if (!j->is_number_integer() || j->get<long long>() < 0) fail(key, "must be a non-negative integer");
            v = j->get<std::size_t>();
        }
        eff_[key] = v;
        return v;
    }

    bool flag(const std::string& key, bool def) {
        bool v = def;
        if (const json* j = take(key)) {
            if (!j->is_boolean()) fail(key, "must be true or false");
            v = j->get<bool>();
        }
        eff_[key] = v;
        return v;
    }

    std::string text(const std::string& key, const std::string& def, std::initializer_list<const char*> allowed = {}) {
        std::string v = def;
        if (const json* j = take(key)) {
            if (!j->is_string()) fail(key, "must be a string");
            v = j->get<std::string>();
            if (allowed.size() &&
                std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return v == a; })) {
                std::string list;
                for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
                fail(key, "must be one of: " + list);
            }
        }
        eff_[key] = v;
        return v;
    }

    Schedule schedule(const std::string& key, const Schedule& def) {
        Schedule v = def;
        if (const json* j = take(key)) {
            if (j->is_number()) {
                v = Schedule(j->get<double>());
            } else if (j->is_array() && !j->empty()) {
                std::vector<std::pair<double, double>> pts;
                for (const auto& p : *j) {
                    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                        fail(key, "schedule entries must be [t_s, value] pairs");
                    }
                    pts.emplace_back(p[0].get<double>(), p[1].get<double>());
                }
                try {
                    v = Schedule(std::move(pts));
                } catch (const std::invalid_argument& e) {
                    fail(key, e.what());
                }
            } else {
                fail(key, "must be a number or a non-empty list of [t_s, value] pairs");
            }
        }
        json out;
        if (v.is_constant()) {
            out = v.points().front().second;
        } else {
            out = json::array();
            for (const auto& [t, y] : v.points()) out.push_back({t, y});
        }
        eff_[key] = out;
        return v;
    }

    Section child(const std::string& key) {
        const json* j = take(key);
        return Section(j, path_ + key + ".", eff_[key]);
    }

    const json* raw(const std::string& key) { return take(key); }

    // Every key must have been consumed.
    void finish() const {
        if (!node_) return;
        for (const auto& [k, _] : node_->items()) {
            if (!used_.count(k)) fail(k, "unknown key");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        const std::string where = key.empty() ? (path_.empty() ? std::string("<root>") : path_.substr(0, path_.size() - 1))
                                              : path_ + key;
        throw SchemaError(where + ": " + msg);
    }

    json& effective() { return eff_; }
    const std::string& path() const { return path_; }

private:
    const json* take(const std::string& key) {
        if (!node_ || !node_->contains(key)) return nullptr;
        used_.insert(key);
        const json& j = (*node_)[key];
        return j.is_null() ? nullptr : &j;
    }

    const json* node_;
    std::string path_;
    json& eff_;
    std::set<std::string> used_;
};

template <class F>
void checked(const std::string& where, F&& f) {
    try {
        f();
    } catch (const std::invalid_argument& e) {
        throw SchemaError(where + ": " + e.what());
    } catch (const DomainError& e) {
        throw SchemaError(where + ": " + e.what());
    }
}

void read_formulation(Section s, Formulation& f) {
    f.x_s = s.number("x_s", f.x_s);
    f.V_l = s.number("V_l_m3", f.V_l);
    f.rho_s = s.number("rho_s_kg_per_m3", f.rho_s);
    f.rho_w = s.number("rho_w_kg_per_m3", f.rho_w);
    f.rho_i = s.number("rho_i_kg_per_m3", f.rho_i);
    f.Cp_s = s.number("Cp_s_J_per_kgK", f.Cp_s);
    f.Cp_w = s.number("Cp_w_J_per_kgK", f.Cp_w);
    f.Cp_i = s.number("Cp_i_J_per_kgK", f.Cp_i);
    f.k_s = s.number("k_s_W_per_mK", f.k_s);
    f.k_w = s.number("k_w_W_per_mK", f.k_w);
    f.k_i = s.number("k_i_W_per_mK", f.k_i);
    f.M_s = s.number("M_s_kg_per_mol", f.M_s);
    f.M_w = s.number("M_w_kg_per_mol", f.M_w);
    f.M_in = s.number("M_in_kg_per_mol", f.M_in);
    f.K_f = s.number("K_f_kgK_per_mol", f.K_f);
    s.finish();
    checked("formulation", [&] { f.validate(); });
}

void read_radiation(Section& s, RadiationSpec& r) {
    r.F_s1 = s.number("F_s1", r.F_s1);
    r.F_s3 = s.number("F_s3", r.F_s3);
}

void read_surroundings(Section s, Surroundings& env) {
    env.T_g = s.schedule("T_g_K", env.T_g);
    env.T_c = s.schedule("T_c_K", env.T_c);
    env.T_u = s.schedule("T_u_K", env.T_u);
    s.finish();
}

void read_integrator(Section s, IntegratorConfig& c) {
    c.rtol = s.number("rtol", c.rtol);
    c.atol = s.number("atol", c.atol);
    if (auto v = s.optional_number("max_step_s")) c.max_step = *v;
    c.initial_step = s.number("initial_step_s", c.initial_step);
    const std::string m = s.text("method", "sdirk4", {"sdirk4", "dopri5"});
    c.method = m == "dopri5" ? Method::DormandPrince5 : Method::Sdirk4;
    c.event_tol = s.number("event_tol_s", c.event_tol);
    c.max_steps = s.count("max_steps", c.max_steps);
    s.finish();
    checked("integrator", [&] { c.validate(); });
}

void read_freezing(Section s, Scenario& sc) {
    auto& cfg = sc.cycle;
    auto& p = cfg.freezing.protocol;
    cfg.T0 = s.number("T0_K", cfg.T0);
    p.h_s1 = s.number("h_s1_W_per_m2K", p.h_s1);
    p.h_s2 = s.number("h_s2_W_per_m2K", p.h_s2);
    p.h_s3 = s.number("h_s3_W_per_m2K", p.h_s3);
    p.h_m = s.number("h_m_kg_per_m2s", p.h_m);
    read_surroundings(s.child("before_nucleation"), p.before);
    read_surroundings(s.child("after_nucleation"), p.after);
    p.visf = s.flag("visf", p.visf);
    p.precondition_time = s.number("precondition_time_s", p.precondition_time);
    p.p_t = s.number("p_t_Pa", p.p_t);
    p.p_t_visf = s.number("p_t_visf_Pa", p.p_t_visf);
    p.visf_ramp_time = s.number("visf_ramp_time_s", p.visf_ramp_time);
    p.p_w_c = s.number("p_w_c_Pa", p.p_w_c);
    const std::string mode = s.text("nucleation", "controlled", {"controlled", "stochastic"});
    p.mode = mode == "stochastic" ? NucleationMode::Stochastic : NucleationMode::Controlled;
    p.T_n = s.number("T_n_K", p.T_n);
    p.k_n = s.number("k_n", p.k_n);
    p.b_n = s.number("b_n", p.b_n);
    p.nucleation_dt = s.number("nucleation_dt_s", p.nucleation_dt);
    p.solidification_fraction = s.number("solidification_fraction", p.solidification_fraction);
    p.T_target = s.number("T_target_K", p.T_target);
    p.T_target_tol = s.number("T_target_tol_K", p.T_target_tol);
    p.horizon = s.number("horizon_s", p.horizon);
    p.dH_fus = s.number("dH_fus_J_per_kg", p.dH_fus);
    p.T_fw = s.number("T_fw_K", p.T_fw);
    read_radiation(s, p.radiation);
    s.finish();
}

void read_primary(Section s, Scenario& sc) {
    auto& m = sc.cycle.primary;
    auto& dp = m.params;
    sc.primary_T0 = s.optional_number("T0_K");
    dp.rho_f = s.number("rho_f_kg_per_m3", dp.rho_f);
    dp.Cp_f = s.number("Cp_f_J_per_kgK", dp.Cp_f);
    dp.k_f = s.number("k_f_W_per_mK", dp.k_f);
    dp.rho_e = s.number("rho_e_kg_per_m3", dp.rho_e);
    dp.h_b = s.number("h_b_W_per_m2K", dp.h_b);
    dp.Rp0 = s.number("Rp0_m_per_s", dp.Rp0);
    dp.Rp1 = s.number("Rp1_per_s", dp.Rp1);
    dp.Rp2 = s.number("Rp2_per_m", dp.Rp2);
    dp.dH_sub = s.number("dH_sub_J_per_kg", dp.dH_sub);
    dp.T_b = s.schedule("T_b_K", dp.T_b);
    dp.T_c = s.schedule("T_c_K", dp.T_c);
    dp.T_u = s.schedule("T_u_K", dp.T_u);
    dp.p_w_c = s.number("p_w_c_Pa", dp.p_w_c);
    m.n_z = s.count("n_z", m.n_z);
    m.horizon = s.number("horizon_s", m.horizon);
    const std::string h = s.text("handoff", "t_f5", {"t_f5", "t_f4"});
    sc.cycle.handoff = h == "t_f4" ? PrimaryHandoff::EndOfSolidification : PrimaryHandoff::EndOfFreezing;
    read_radiation(s, m.radiation);
    s.finish();
}

void read_secondary(Section s, Scenario& sc) {
    auto& m = sc.cycle.secondary;
    auto& k = m.kinetics;
    auto& bc = m.conditions;
    sc.secondary_T0 = s.optional_number("T0_K");
    sc.cycle.c_w0 = s.number("c_w0_kg_per_kg", sc.cycle.c_w0);
    k.f_a = s.number("f_a_per_s", k.f_a);
    k.E_a = s.number("E_a_J_per_mol", k.E_a);
    k.c_star = s.number("c_star_kg_per_kg", k.c_star);
    k.rho_d = s.number("rho_d_kg_per_m3", k.rho_d);
    k.dH_des = s.number("dH_des_J_per_kg", k.dH_des);
    k.k_e = s.number("k_e_W_per_mK", k.k_e);
    k.rho_e = s.number("rho_e_kg_per_m3", k.rho_e);
    k.Cp_e = s.number("Cp_e_J_per_kgK", k.Cp_e);
    bc.h_b = s.number("h_b_W_per_m2K", bc.h_b);
    bc.T_b = s.schedule("T_b_K", bc.T_b);
    bc.T_c = s.schedule("T_c_K", bc.T_c);
    bc.T_u = s.schedule("T_u_K", bc.T_u);
    m.n_z = s.count("n_z", m.n_z);
    m.c_target = s.number("c_target_kg_per_kg", m.c_target);
    m.horizon = s.number("horizon_s", m.horizon);
    sc.cycle.extra_heating_time = s.number("extra_heating_time_s", sc.cycle.extra_heating_time);
    read_radiation(s, m.radiation);
    s.finish();
}

void read_chamber(Section s, Scenario& sc) {
    auto& c = sc.chamber;
    c.V_c = s.number("V_c_m3", c.V_c);
    c.j_w_max = s.number("j_w_max_kg_per_s", c.j_w_max);
    c.n_vial = s.number("n_vial", c.n_vial);
    c.T_bar = s.number("T_bar_K", c.T_bar);
    c.p_setpoint = s.number("p_setpoint_Pa", c.p_setpoint);
    sc.chamber_in_cycle = s.flag("limit_cycle", sc.chamber_in_cycle);
    s.finish();
    checked("chamber", [&] { c.validate(); });
}

void read_analysis(Section s, AnalysisInputs& a) {
    if (const json* h = s.raw("h_W_per_m2K")) {
        if (!h->is_array() || h->empty() || !std::all_of(h->begin(), h->end(), [](const json& v) { return v.is_number(); })) {
            s.fail("h_W_per_m2K", "must be a non-empty list of numbers");
        }
        a.h_W_per_m2K = h->get<std::vector<double>>();
    }
    s.effective()["h_W_per_m2K"] = a.h_W_per_m2K;
    a.length_m = s.number("length_m", a.length_m);
    a.k_W_per_mK = s.number("k_W_per_mK", a.k_W_per_mK);
    a.Fo_max = s.number("Fo_max", a.Fo_max);
    a.Fo_points = static_cast<int>(s.count("Fo_points", static_cast<std::size_t>(a.Fo_points)));
    a.n_terms = static_cast<int>(s.count("n_terms", static_cast<std::size_t>(a.n_terms)));
    a.medium.porosity = s.number("porosity", a.medium.porosity);
    a.medium.tortuosity = s.number("tortuosity", a.medium.tortuosity);
    a.medium.pore_radius = s.number("pore_radius_m", a.medium.pore_radius);
    a.medium.D_g = s.number("D_g_m2_per_s", a.medium.D_g);
    a.T_K = s.number("T_K", a.T_K);
    a.M_g_per_mol = s.number("M_g_per_mol", a.M_g_per_mol);
    a.diffusion_length_m = s.number("diffusion_length_m", a.diffusion_length_m);
    a.k_d_per_s = s.number("k_d_per_s", a.k_d_per_s);
    a.solid_length_m = s.number("solid_length_m", a.solid_length_m);
    a.solid_diffusivity_m2_per_s = s.number("solid_diffusivity_m2_per_s", a.solid_diffusivity_m2_per_s);
    s.finish();
    if (a.Fo_points < 2) throw SchemaError("analysis.Fo_points: must be at least 2");
    if (a.n_terms < 1) throw SchemaError("analysis.n_terms: must be at least 1");
    if (!(a.length_m > 0 && a.k_W_per_mK > 0 && a.Fo_max > 0 && a.diffusion_length_m > 0 && a.k_d_per_s > 0 &&
          a.solid_length_m > 0 && a.solid_diffusivity_m2_per_s > 0 && a.T_K > 0 && a.M_g_per_mol > 0)) {
        throw SchemaError("analysis: lengths, rates and properties must be positive");
    }
    checked("analysis", [&] { a.medium.validate(); });
}

void read_references(const json& arr, const std::string& base_dir, Scenario& sc, json& eff) {
    if (!arr.is_array()) throw SchemaError("references: must be a list");
    eff = json::array();
    for (std::size_t i = 0; i < arr.size(); ++i) {
        json e = json::object();
        Section s(&arr[i], "references[" + std::to_string(i) + "].", e);
        ReferenceSeries r;
        r.name = s.text("name", "reference_" + std::to_string(i));
        r.run = s.text("run", "cycle", {"freeze", "primary", "secondary", "cycle", "failure"});
        r.observable = s.text("observable", "");
        if (r.observable.empty()) s.fail("observable", "is required");
        r.units = s.text("units", "");
        r.terminal_time_s = s.optional_number("terminal_time_s");
        const bool has_file = s.has("file"), has_samples = s.has("samples");
        if (has_file == has_samples) s.fail("", "needs exactly one of file or samples");
        if (has_file) {
            std::filesystem::path p = s.text("file", "");
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            try {
                read_reference_csv(p.string(), r);
            } catch (const SchemaError& err) {
                s.fail("file", err.what());
            }
        } else {
            const json* smp = s.raw("samples");
            if (!smp || !smp->is_array()) s.fail("samples", "must be a list of [t_s, value] pairs");
            for (const auto& p : *smp) {
                if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                    s.fail("samples", "entries must be [t_s, value] pairs");
                }
                r.t.push_back(p[0].get<double>());
                r.value.push_back(p[1].get<double>());
            }
            e["samples"] = *smp;
        }
        if (r.t.empty()) s.fail("", "reference series is empty");
        for (std::size_t k = 1; k < r.t.size(); ++k) {
            if (!(r.t[k] > r.t[k - 1])) s.fail("", "reference times must be strictly increasing");
        }
        Section th = s.child("thresholds");
        r.thresholds.rmse = th.optional_number("rmse");
        r.thresholds.max_abs = th.optional_number("max_abs");
        r.thresholds.terminal_time_delta_s = th.optional_number("terminal_time_delta_s");
        r.thresholds.terminal_time_rel = th.optional_number("terminal_time_rel");
        th.finish();
        s.finish();
        sc.references.push_back(std::move(r));
        eff.push_back(e);
    }
}

}  // namespace

Scenario parse_scenario(const json& doc, const std::string& base_dir) {
    if (!doc.is_object()) throw SchemaError("<root>: scenario must be a JSON object");
    Scenario sc;
    json eff = json::object();
    Section root(&doc, "", eff);

    sc.name = root.text("name", sc.name);
    root.text("description", "");
    if (doc.contains("stages")) {
        const json* st = root.raw("stages");
        if (!st || !st->is_array()) root.fail("stages", "must be a list");
        if (st->empty()) root.fail("stages", "stage selection is empty");
        sc.stages.clear();
        for (const auto& v : *st) {
            const std::string k = v.is_string() ? v.get<std::string>() : "";
            if (k == "freezing") sc.stages.push_back(Stage::Freezing);
            else if (k == "primary_drying") sc.stages.push_back(Stage::PrimaryDrying);
            else if (k == "secondary_drying") sc.stages.push_back(Stage::SecondaryDrying);
            else root.fail("stages", "entries must be freezing, primary_drying or secondary_drying");
        }
    }
    {
        json names = json::array();
        for (Stage s : sc.stages) names.push_back(stage_key(s));
        eff["stages"] = names;
    }

    if (const json* seed = root.raw("seed")) {
        if (!seed->is_number_unsigned()) root.fail("seed", "must be a non-negative integer");
        sc.seed = seed->get<std::uint64_t>();
    }
    eff["seed"] = sc.seed;

    // Order matters: formulation and vial fix the geometry the drying
    // stages share.
    read_formulation(root.child("formulation"), sc.cycle.freezing.formulation);
    {
        Section v = root.child("vial");
        sc.cycle.freezing.d = v.number("d_m", sc.cycle.freezing.d);
        if (!(sc.cycle.freezing.d > 0.0)) v.fail("d_m", "must be positive");
        const double H_mix = mixture_properties(sc.cycle.freezing.formulation, sc.cycle.freezing.d).H;
        const double H = v.number("H_m", H_mix);
        if (!(H > 0.0)) v.fail("H_m", "must be positive");
        const RadiationSpec rad_default{};
        const double eps = v.number("eps_gl", rad_default.eps_gl);
        v.finish();
        sc.cycle.primary.geometry = make_geometry(sc.cycle.freezing.d, H);
        sc.cycle.secondary.geometry = sc.cycle.primary.geometry;
        sc.cycle.freezing.protocol.radiation.eps_gl = eps;
        sc.cycle.primary.radiation.eps_gl = eps;
        sc.cycle.secondary.radiation.eps_gl = eps;
    }
    read_freezing(root.child("freezing"), sc);
    read_primary(root.child("primary_drying"), sc);
    read_secondary(root.child("secondary_drying"), sc);
    read_chamber(root.child("chamber"), sc);
    if (sc.chamber_in_cycle) sc.cycle.chamber = sc.chamber;

    IntegratorConfig ic;
    read_integrator(root.child("integrator"), ic);
    sc.cycle.freezing.integrator = ic;
    sc.cycle.primary.integrator = ic;
    sc.cycle.secondary.integrator = ic;

    {
        Section out = root.child("output");
        sc.cycle.output_dt = out.number("dt_s", sc.cycle.output_dt);
        if (!(sc.cycle.output_dt > 0.0)) out.fail("dt_s", "must be positive");
        out.finish();
    }
    read_analysis(root.child("analysis"), sc.analysis);
    if (const json* refs = root.raw("references")) read_references(*refs, base_dir, sc, eff["references"]);
    root.finish();

    sc.cycle.freezing.protocol.seed = sc.seed;
    checked("freezing", [&] { sc.cycle.freezing.protocol.validate(); });
    checked("primary_drying", [&] { sc.cycle.primary.validate(); });
    checked("secondary_drying", [&] { sc.cycle.secondary.validate(); });
    if (!(sc.cycle.c_w0 >= 0.0)) throw SchemaError("secondary_drying.c_w0_kg_per_kg: must be non-negative");
    if (!(sc.cycle.extra_heating_time >= 0.0)) {
        throw SchemaError("secondary_drying.extra_heating_time_s: must be non-negative");
    }

    // Derived quantities, logged for auditability.
    const auto mix = mixture_properties(sc.cycle.freezing.formulation, sc.cycle.freezing.d);
    eff["derived"] = {{"m_s_kg", mix.m_s},
                      {"m_w0_kg", mix.m_w0},
                      {"rho_l_kg_per_m3", mix.rho_l},
                      {"rho_f_mixing_kg_per_m3", mix.rho_f},
                      {"H_mixture_m", mix.H},
                      {"A_z_m2", sc.cycle.primary.geometry.A_z}};
    sc.effective = std::move(eff);
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path + ": cannot open scenario file");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_scenario(doc, dir.empty() ? "." : dir.string());
}

void set_scenario_value(json& doc, const std::string& dotted_path, double value) {
    if (dotted_path.empty()) throw SchemaError("sweep: empty parameter path");
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = dotted_path.find('.', start);
        const std::string key = dotted_path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw SchemaError("sweep: malformed parameter path '" + dotted_path + "'");
        if (!node->is_object()) throw SchemaError("sweep: '" + dotted_path + "' does not name an object member");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

void read_reference_csv(const std::string& path, ReferenceSeries& out) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open reference file " + path);
    std::string line;
    bool header = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw SchemaError(path + ":" + std::to_string(lineno) + ": expected t_s,value");
        double t = 0, v = 0;
        const char* b = line.data();
        const auto r1 = std::from_chars(b, b + comma, t);
        const auto r2 = std::from_chars(b + comma + 1, b + line.size(), v);
        if (r1.ec != std::errc() || r2.ec != std::errc()) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": not a number");
        }
        out.t.push_back(t);
        out.value.push_back(v);
    }
}

}  // namespace lyo
