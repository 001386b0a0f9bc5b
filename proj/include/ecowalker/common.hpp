#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ecowalker {

using Vec2 = Eigen::Vector2d;

constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

enum class Side { Left = 0, Right = 1 };

constexpr Side opposite(Side s) { return s == Side::Left ? Side::Right : Side::Left; }
constexpr int side_index(Side s) { return static_cast<int>(s); }
constexpr std::string_view side_suffix(Side s) { return s == Side::Left ? "L" : "R"; }

// Base for all library errors. Messages name the violated condition.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParamError : public Error {
public:
    using Error::Error;
};

}  // namespace ecowalker
