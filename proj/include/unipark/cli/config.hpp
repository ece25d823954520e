#ifndef UNIPARK_CLI_CONFIG_HPP_
#define UNIPARK_CLI_CONFIG_HPP_

// Scenario files are INI text. Each section is one scenario; an optional
// [defaults] section supplies keys every scenario inherits.
//
//   [defaults]
//   dt = 1e-3
//   t_max = 50
//
//   [quadratic]
//   controller = optimal
//   penalty = Quadratic
//   eps1 = 1
//   eps2 = 1
//   ic_polar = 1, -pi/2, -pi/2
//
// controller is optimal, continuous or adaptive; penalty1 / penalty2 pick
// per-channel penalties. ic_polar and ic_cartesian take several initial
// conditions separated by ';'. Comments must start the line.
//
// Numbers accept products and quotients of literals and `pi`, e.g. -pi/2
// or 3*pi/4.

#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "unipark/control.hpp"
#include "unipark/model.hpp"
#include "unipark/penalty.hpp"
#include "unipark/sim.hpp"

namespace unipark::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ControllerKind { kOptimal, kContinuous, kAdaptive };

struct InitialCondition {
  std::string label;  // as written in the file
  PolarStated xi;
};

struct Scenario {
  std::string name;
  ControllerKind controller{ControllerKind::kOptimal};
  BuiltinPenalty penalty1{BuiltinPenalty::kQuadratic};
  BuiltinPenalty penalty2{BuiltinPenalty::kQuadratic};
  double eps1{1};
  double eps2{1};
  std::optional<Saturation> saturation;
  std::vector<InitialCondition> ics;
  SimParams sim;
  bool require_convergence{false};

  SlipParamsd slip;
  double mu1{0.5};
  double mu2{0.5};
  double eps1_hat0{0};
  double eps2_hat0{0};
  double n0{1};

  std::vector<double> kappa;  // probe grid

  bool adaptive() const { return controller == ControllerKind::kAdaptive; }
};

/// "-pi/2", "0.25", "3*pi/4", ...
double parse_number(std::string_view text);

std::vector<Scenario> parse_scenarios(std::istream& in);
std::vector<Scenario> load_scenarios(const std::filesystem::path& path);

/// RelayApprox in the continuous variant gets a tabulated transform.
ControllerConfig controller_config(const Scenario& s);
AdaptiveState adaptive_state(const Scenario& s);

}  // namespace unipark::cli

#endif  // UNIPARK_CLI_CONFIG_HPP_
