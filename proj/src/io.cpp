#include "lyo/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace lyo {

void Table::add(std::string name, std::vector<double> values) {
    if (!data.empty() && values.size() != rows()) throw std::invalid_argument("Table: column length mismatch");
    columns.push_back(std::move(name));
    data.push_back(std::move(values));
}

bool Table::has(const std::string& name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

const std::vector<double>& Table::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("no column named " + name);
    return data[static_cast<std::size_t>(it - columns.begin())];
}

std::string format_double(double v) {
    if (std::isnan(v)) return {};
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += ',';
        out += t.columns[c];
    }
    out += '\n';
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < t.data.size(); ++c) {
            if (c) out += ',';
            out += format_double(t.data[c][r]);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json to_json(const Table& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < t.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& col : t.data) {
            if (std::isnan(col[r])) row.push_back(nullptr);
            else row.push_back(col[r]);
        }
        rows.push_back(std::move(row));
    }
    return {{"columns", t.columns}, {"rows", std::move(rows)}};
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("error while writing " + path);
}

namespace {

std::vector<double> uniform_clock(double t0, double t1, double dt) {
    std::vector<double> c;
    const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / dt));
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        if (t < t1) c.push_back(t);
    }
    c.push_back(t1);
    return c;
}

}  // namespace

Table freezing_table(const FreezingResult& r, const FreezingProtocol& p) {
    std::vector<double> t, stage, T, m_w, m_i, pt, Tg, Tc, Tu;
    const Schedule p_visf = visf_pressure(p, r.t_f1);
    for (const auto& seg : r.segments) {
        for (std::size_t i = 0; i < seg.t.size(); ++i) {
            const double ti = seg.t[i];
            const bool before = ti < r.t_f3 || (ti == r.t_f3 && seg.stage != FreezeStage::Solidification &&
                                                seg.stage != FreezeStage::FinalCooling);
            const Surroundings& env = before ? p.before : p.after;
            t.push_back(ti);
            stage.push_back(static_cast<double>(static_cast<int>(seg.stage)));
            T.push_back(seg.T[i]);
            m_w.push_back(seg.m_w[i]);
            m_i.push_back(seg.m_i[i]);
            pt.push_back(seg.stage == FreezeStage::Visf ? p_visf(ti) : p.p_t);
            Tg.push_back(env.T_g(ti));
            Tc.push_back(env.T_c(ti));
            Tu.push_back(env.T_u(ti));
        }
    }
    Table tab;
    tab.add("t_s", std::move(t));
    tab.add("stage", std::move(stage));
    tab.add("T_K", std::move(T));
    tab.add("m_w_kg", std::move(m_w));
    tab.add("m_i_kg", std::move(m_i));
    tab.add("p_t_Pa", std::move(pt));
    tab.add("T_g_K", std::move(Tg));
    tab.add("T_c_K", std::move(Tc));
    tab.add("T_u_K", std::move(Tu));
    return tab;
}

Table primary_table(const PrimaryResult& r, const PrimaryModel& m, double dt) {
    const std::size_t n = r.n_z;
    const auto clock = uniform_clock(r.t.front(), r.t.back(), dt);
    std::vector<double> Tavg, Tbot, Ttop, S, Nw, p, Tb;
    for (double t : clock) {
        const auto y = r.solution.at(t);
        const std::span<const double> T(y.data(), n);
        const double pw = y.size() > n + 1 ? y[n + 1] : m.params.p_w_c;
        Tavg.push_back(profile_average(T));
        Tbot.push_back(T[n - 1]);
        Ttop.push_back(T[0]);
        S.push_back(y[n]);
        Nw.push_back(m.sublimation ? sublimation_flux(T[0], y[n], m.params, pw) : 0.0);
        p.push_back(pw);
        Tb.push_back(m.params.T_b(t));
    }
    Table tab;
    tab.add("t_s", clock);
    tab.add("T_avg_K", std::move(Tavg));
    tab.add("T_bottom_K", std::move(Tbot));
    tab.add("T_top_K", std::move(Ttop));
    tab.add("S_m", std::move(S));
    tab.add("N_w_kg_per_m2s", std::move(Nw));
    tab.add("p_w_c_Pa", std::move(p));
    tab.add("T_b_K", std::move(Tb));
    return tab;
}

Table secondary_table(const SecondaryResult& r, const SecondaryModel& m, double dt) {
    const std::size_t n = r.n_z;
    const auto clock = r.t.size() == 1 ? r.t : uniform_clock(r.t.front(), r.t.back(), dt);
    std::vector<double> Tavg, Tbot, Ttop, c, Tb;
    for (double t : clock) {
        const auto y = r.solution.at(t);
        const std::span<const double> T(y.data(), n), cw(y.data() + n, n);
        Tavg.push_back(profile_average(T));
        Tbot.push_back(T[n - 1]);
        Ttop.push_back(T[0]);
        c.push_back(profile_average(cw));
        Tb.push_back(m.conditions.T_b(t));
    }
    Table tab;
    tab.add("t_s", clock);
    tab.add("T_avg_K", std::move(Tavg));
    tab.add("T_bottom_K", std::move(Tbot));
    tab.add("T_top_K", std::move(Ttop));
    tab.add("c_avg_kg_per_kg", std::move(c));
    tab.add("T_b_K", std::move(Tb));
    return tab;
}

Table cycle_table(const CycleResult& r) {
    const auto& tr = r.trace;
    Table tab;
    tab.add("t_s", tr.t);
    std::vector<double> st(tr.stage.begin(), tr.stage.end());
    tab.add("stage", std::move(st));
    tab.add("T_avg_K", tr.T_avg);
    tab.add("T_bottom_K", tr.T_bottom);
    tab.add("T_top_K", tr.T_top);
    tab.add("m_w_kg", tr.m_w);
    tab.add("m_i_kg", tr.m_i);
    tab.add("S_m", tr.S);
    tab.add("c_avg_kg_per_kg", tr.c_avg);
    tab.add("p_Pa", tr.p);
    tab.add("T_b_K", tr.T_shelf);
    tab.add("T_c_K", tr.T_wall);
    tab.add("T_g_K", tr.T_gas);
    return tab;
}

nlohmann::json ComparisonReport::to_json() const {
    nlohmann::json j = {{"name", name},       {"observable", observable}, {"points", points},
                        {"rmse", rmse},       {"max_abs", max_abs},       {"passed", passed},
                        {"exceeded", exceeded}};
    j["terminal_time_delta_s"] = terminal_time_delta ? nlohmann::json(*terminal_time_delta) : nlohmann::json(nullptr);
    return j;
}

ComparisonReport compare_with_reference(const std::vector<double>& sim_t, const std::vector<double>& sim_v,
                                        const ReferenceSeries& ref, std::optional<double> sim_terminal_time) {
    if (sim_t.size() != sim_v.size() || sim_t.empty()) {
        throw std::invalid_argument("compare_with_reference: simulation series is empty or ragged");
    }
    if (ref.t.size() != ref.value.size()) throw std::invalid_argument("compare_with_reference: ragged reference");

    ComparisonReport rep;
    rep.name = ref.name;
    rep.observable = ref.observable;
    double sq = 0.0;
    for (std::size_t k = 0; k < ref.t.size(); ++k) {
        const double x = ref.t[k];
        if (x < sim_t.front() || x > sim_t.back()) continue;
        auto hi = std::upper_bound(sim_t.begin(), sim_t.end(), x);
        double s;
        if (hi == sim_t.end()) {
            s = sim_v.back();
        } else {
            const std::size_t i = static_cast<std::size_t>(hi - sim_t.begin());
            if (i == 0) {
                s = sim_v.front();
            } else {
                const double w = (x - sim_t[i - 1]) / (sim_t[i] - sim_t[i - 1]);
                s = sim_v[i - 1] + w * (sim_v[i] - sim_v[i - 1]);
            }
        }
        if (std::isnan(s)) continue;
        const double e = s - ref.value[k];
        sq += e * e;
        rep.max_abs = std::max(rep.max_abs, std::abs(e));
        ++rep.points;
    }
    if (rep.points == 0) {
        throw std::domain_error("reference '" + ref.name + "' does not overlap the simulated time range");
    }
    rep.rmse = std::sqrt(sq / static_cast<double>(rep.points));
    if (ref.terminal_time_s && sim_terminal_time) rep.terminal_time_delta = *sim_terminal_time - *ref.terminal_time_s;

    const auto& th = ref.thresholds;
    if (th.rmse && rep.rmse > *th.rmse) rep.exceeded.push_back("rmse");
    if (th.max_abs && rep.max_abs > *th.max_abs) rep.exceeded.push_back("max_abs");
    if (rep.terminal_time_delta) {
        const double d = std::abs(*rep.terminal_time_delta);
        if (th.terminal_time_delta_s && d > *th.terminal_time_delta_s) rep.exceeded.push_back("terminal_time_delta_s");
        if (th.terminal_time_rel && d > *th.terminal_time_rel * std::abs(*ref.terminal_time_s)) {
            rep.exceeded.push_back("terminal_time_rel");
        }
    }
    rep.passed = rep.exceeded.empty();
    return rep;
}

}  // namespace lyo
