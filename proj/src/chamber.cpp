#include "lyo/chamber.hpp"

#include <stdexcept>

namespace lyo {

void ChamberModel::validate() const {
    if (!(V_c > 0.0)) throw std::invalid_argument("ChamberModel: V_c must be positive");
    if (!(j_w_max >= 0.0)) throw std::invalid_argument("ChamberModel: j_w_max must be non-negative");
    if (!(n_vial >= 0.0)) throw std::invalid_argument("ChamberModel: n_vial must be non-negative");
    if (!(T_bar > 0.0) || !(M_w > 0.0) || !(R > 0.0)) {
        throw std::invalid_argument("ChamberModel: T_bar, M_w and R must be positive");
    }
    if (!(p_setpoint >= 0.0)) throw std::invalid_argument("ChamberModel: p_setpoint must be non-negative");
}

double vapor_flow(const ChamberModel& c, double N_w, double A_z) { return c.n_vial * A_z * N_w; }

double chamber_pressure_rhs(const ChamberModel& c, double N_w, double A_z, double p_w_c) {
    const double rate = (vapor_flow(c, N_w, A_z) - c.j_w_max) * c.R * c.T_bar / (c.V_c * c.M_w);
    if (rate < 0.0 && p_w_c <= c.p_setpoint) return 0.0;
    return rate;
}

PrimaryResult run_primary_with_condenser(const PrimaryModel& m, const ChamberModel& c,
                                         std::span<const double> initial_T, double t0) {
    c.validate();
    PressureCoupling coupling;
    coupling.p0 = c.p_setpoint;
    const double A_z = m.geometry.A_z;
    coupling.dpdt = [c, A_z](double, double N_w, double p) { return chamber_pressure_rhs(c, N_w, A_z, p); };
    return run_primary(m, initial_T, t0, &coupling);
}

}  // namespace lyo
