#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hamport {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error taxonomy. Everything derives from std::runtime_error so callers can
// catch coarsely; the CLI maps any of these to exit code 1.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct resolution_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct model_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct interconnection_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct unsupported_order_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct setup_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct assembly_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct spec_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct alignment_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct step_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw input_error(msg);
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }
inline bool all_finite(const Mat& m) { return m.allFinite(); }

}  // namespace hamport
