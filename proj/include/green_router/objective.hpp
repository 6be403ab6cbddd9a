#ifndef GREEN_ROUTER_OBJECTIVE_HPP
#define GREEN_ROUTER_OBJECTIVE_HPP

// Fuel model coefficients, objective parameter presets and the closed-form
// optimal speeds of the convex arc cost.

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "common.hpp"

namespace green_router {

enum class ProblemKind { prp, fcvrp, emvrp };

inline std::string_view to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::prp: return "prp";
        case ProblemKind::fcvrp: return "fcvrp";
        case ProblemKind::emvrp: return "emvrp";
    }
    return "?";
}

inline ProblemKind parse_problem_kind(std::string_view text) {
    if (text == "prp" || text == "PRP") return ProblemKind::prp;
    if (text == "fcvrp" || text == "FCVRP") return ProblemKind::fcvrp;
    if (text == "emvrp" || text == "EMVRP") return ProblemKind::emvrp;
    throw std::invalid_argument("unknown problem kind: " + std::string(text));
}

/// Raw vehicle, fuel and road parameters of the comprehensive emissions model.
struct PhysicalParams {
    double curb_weight = 6350.0;           // kg
    double fuel_air_ratio = 1.0;
    double engine_friction = 0.2;          // kJ/rev/l
    double engine_speed = 33.0;            // rev/s
    double engine_displacement = 5.0;      // l
    double gravity = 9.81;                 // m/s^2
    double drag_coefficient = 0.7;
    double air_density = 1.2041;           // kg/m^3
    double frontal_area = 3.912;           // m^2
    double rolling_resistance = 0.01;
    double drivetrain_efficiency = 0.4;
    double engine_efficiency = 0.9;
    double heating_value = 44.0;           // kJ/g
    double conversion_factor = 737.0;      // g/s to l/s
    double acceleration = 0.0;             // m/s^2
    double road_angle = 0.0;               // rad
};

struct FuelCoefficients {
    double w1 = 0, w2 = 0, w3 = 0, w4 = 0;
};

/// Reduces the emissions model to F = d (w1/v + w2 + w3 f + w4 v^2).
/// Only defined for null acceleration and road angle.
inline FuelCoefficients derive_w_coefficients(const PhysicalParams& p) {
    const double positive[] = {p.curb_weight, p.fuel_air_ratio, p.engine_friction, p.engine_speed,
                               p.engine_displacement, p.gravity, p.drag_coefficient, p.air_density,
                               p.frontal_area, p.rolling_resistance, p.drivetrain_efficiency,
                               p.engine_efficiency, p.heating_value, p.conversion_factor};
    for (double v : positive)
        if (!(v > 0)) throw ValidationError("physical parameters must be strictly positive");
    if (p.acceleration != 0.0 || p.road_angle != 0.0)
        throw ValidationError("coefficient reduction requires zero acceleration and road angle");

    const double lambda = p.fuel_air_ratio / (p.heating_value * p.conversion_factor);
    const double gamma = 1.0 / (1000.0 * p.drivetrain_efficiency * p.engine_efficiency);
    const double beta = 0.5 * p.drag_coefficient * p.air_density * p.frontal_area;
    return {lambda * p.engine_friction * p.engine_speed * p.engine_displacement,
            lambda * p.curb_weight * gamma * p.gravity * p.rolling_resistance,
            lambda * gamma * p.gravity * p.rolling_resistance,
            lambda * beta * gamma};
}

struct ObjectiveParams {
    double w1 = 0, w2 = 0, w3 = 0, w4 = 0;
    double fuel_cost = 1.0;         // money per liter
    double driver_wage = 0.0;       // money per second
    double empty_weight = 0.0;      // EMVRP vehicle weight, load units
    double rate_empty = 1.0;        // FCVRP consumption rate without load
    double rate_full = 2.0;         // FCVRP consumption rate at full load
    double route_fixed_cost = 0.0;  // FCVRP cost per used vehicle
    double warp_penalty = 1e8;      // per unit of time warp

    bool operator==(const ObjectiveParams&) const = default;
};

inline void validate(const ObjectiveParams& p, ProblemKind kind) {
    if (kind == ProblemKind::prp && !(p.w1 > 0 && p.w4 > 0)) throw ValidationError("w1 > 0 and w4 > 0 required");
    if (p.fuel_cost < 0 || p.driver_wage < 0) throw ValidationError("fuel cost and driver wage must be nonnegative");
    if (!(p.warp_penalty > 0)) throw ValidationError("time-warp penalty must be positive");
}

/// Named parameter presets. `capacity` resolves the EMVRP empty weight (0.15 Q).
inline ObjectiveParams preset(std::string_view name, double capacity = 0.0) {
    ObjectiveParams p;
    if (name == "prp-uk-2012") {
        p.w1 = 1.01763908e-3;
        p.w2 = 5.33605218e-5;
        p.w3 = 8.40323178e-9;
        p.w4 = 1.41223439e-7;
        p.fuel_cost = 1.4;
        p.driver_wage = 2.22222222e-3;
    } else if (name == "prp-uk-2012-derived") {
        const auto w = derive_w_coefficients(PhysicalParams{});
        p.w1 = w.w1, p.w2 = w.w2, p.w3 = w.w3, p.w4 = w.w4;
        p.fuel_cost = 1.4;
        p.driver_wage = 8.0 / 3600.0;
    } else if (name == "fcvrp-xiao-2012") {
        p.fuel_cost = 1.0;
        p.rate_empty = 1.0;
        p.rate_full = 2.0;
        p.route_fixed_cost = 0.0;
    } else if (name == "emvrp-kara-2007") {
        p.empty_weight = 0.15 * capacity;
    } else {
        throw std::invalid_argument("unknown preset: " + std::string(name));
    }
    return p;
}

inline std::string_view default_preset(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::prp: return "prp-uk-2012";
        case ProblemKind::fcvrp: return "fcvrp-xiao-2012";
        case ProblemKind::emvrp: return "emvrp-kara-2007";
    }
    return "prp-uk-2012";
}

/// Reads `key value` lines on top of `base`. `preset <name>` restarts from a
/// named preset; `empty_weight_fraction x` sets the EMVRP weight to x * capacity.
inline ObjectiveParams read_params(std::istream& in, ObjectiveParams base, double capacity) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "preset") {
            std::string name;
            if (!(ls >> name)) throw ParseError(line_no, "preset needs a name");
            base = preset(name, capacity);
            continue;
        }
        double value = 0;
        if (!(ls >> value)) throw ParseError(line_no, "missing numeric value for '" + key + "'");
        if (key == "w1") base.w1 = value;
        else if (key == "w2") base.w2 = value;
        else if (key == "w3") base.w3 = value;
        else if (key == "w4") base.w4 = value;
        else if (key == "fuel_cost") base.fuel_cost = value;
        else if (key == "driver_wage") base.driver_wage = value;
        else if (key == "empty_weight") base.empty_weight = value;
        else if (key == "empty_weight_fraction") base.empty_weight = value * capacity;
        else if (key == "rate_empty") base.rate_empty = value;
        else if (key == "rate_full") base.rate_full = value;
        else if (key == "route_fixed_cost") base.route_fixed_cost = value;
        else if (key == "warp_penalty") base.warp_penalty = value;
        else throw ParseError(line_no, "unknown parameter '" + key + "'");
    }
    return base;
}

inline ObjectiveParams read_params_file(const std::string& path, ObjectiveParams base, double capacity) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open parameter file " + path);
    return read_params(in, base, capacity);
}

inline void write_params(std::ostream& out, const ObjectiveParams& p) {
    out << "w1 " << format_exact(p.w1) << '\n'
        << "w2 " << format_exact(p.w2) << '\n'
        << "w3 " << format_exact(p.w3) << '\n'
        << "w4 " << format_exact(p.w4) << '\n'
        << "fuel_cost " << format_exact(p.fuel_cost) << '\n'
        << "driver_wage " << format_exact(p.driver_wage) << '\n'
        << "empty_weight " << format_exact(p.empty_weight) << '\n'
        << "rate_empty " << format_exact(p.rate_empty) << '\n'
        << "rate_full " << format_exact(p.rate_full) << '\n'
        << "route_fixed_cost " << format_exact(p.route_fixed_cost) << '\n'
        << "warp_penalty " << format_exact(p.warp_penalty) << '\n';
}

/// Liters consumed on an arc of length d (m) carrying load f at speed v (m/s).
inline double arc_fuel(double d, double f, double v, const ObjectiveParams& p) {
    if (!(v > 0)) throw std::domain_error("arc speed must be positive");
    return d * (p.w1 / v + p.w2 + p.w3 * f + p.w4 * v * v);
}

struct SpeedBounds {
    double min = 0, max = kInfinity;
};

inline double clamp_speed(double v, const std::optional<SpeedBounds>& bounds) {
    return bounds ? std::clamp(v, bounds->min, bounds->max) : v;
}

/// Speed minimizing fuel alone.
inline double optimal_speed_fuel(const ObjectiveParams& p, std::optional<SpeedBounds> bounds = {}) {
    if (!(p.w4 > 0)) throw std::domain_error("w4 must be positive");
    return clamp_speed(std::cbrt(p.w1 / (2.0 * p.w4)), bounds);
}

/// Speed minimizing fuel plus driver wage when no waiting follows the arc.
inline double optimal_speed_fuel_driver(const ObjectiveParams& p, std::optional<SpeedBounds> bounds = {}) {
    if (!(p.w4 > 0)) throw std::domain_error("w4 must be positive");
    if (!(p.fuel_cost > 0)) throw std::domain_error("fuel cost must be positive");
    return clamp_speed(std::cbrt((p.driver_wage / p.fuel_cost + p.w1) / (2.0 * p.w4)), bounds);
}

}  // namespace green_router

#endif
