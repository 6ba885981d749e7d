#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cwlab {

// Every module error carries a stable kind name and the CLI exit code it maps to.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, int exit_code, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)), exit_code_(exit_code) {}

  const std::string& kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return exit_code_; }

 private:
  std::string kind_;
  int exit_code_;
};

namespace exit_codes {
inline constexpr int kConfig = 2;
inline constexpr int kGeometry = 3;
inline constexpr int kCharacteristic = 4;
inline constexpr int kDynamics = 5;
inline constexpr int kNumerics = 6;
inline constexpr int kEstimator = 7;
inline constexpr int kIo = 8;
inline constexpr int kInternal = 9;
}  // namespace exit_codes

#define CWLAB_DEFINE_ERROR(Name, code)                                  \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(#Name, code, what) {} \
  }

CWLAB_DEFINE_ERROR(ConfigError, exit_codes::kConfig);
CWLAB_DEFINE_ERROR(DomainError, exit_codes::kGeometry);
CWLAB_DEFINE_ERROR(ChartError, exit_codes::kGeometry);
CWLAB_DEFINE_ERROR(GeometryError, exit_codes::kGeometry);
CWLAB_DEFINE_ERROR(OffCharacteristic, exit_codes::kCharacteristic);
CWLAB_DEFINE_ERROR(GlancingCornerError, exit_codes::kCharacteristic);
CWLAB_DEFINE_ERROR(GlancingReflect, exit_codes::kCharacteristic);
CWLAB_DEFINE_ERROR(StepSizeUnderflow, exit_codes::kDynamics);
CWLAB_DEFINE_ERROR(IntegratorError, exit_codes::kDynamics);
CWLAB_DEFINE_ERROR(CornerOfLinkError, exit_codes::kDynamics);
CWLAB_DEFINE_ERROR(BilliardUnresolved, exit_codes::kDynamics);
CWLAB_DEFINE_ERROR(AccuracyError, exit_codes::kNumerics);
CWLAB_DEFINE_ERROR(QuadratureError, exit_codes::kNumerics);
CWLAB_DEFINE_ERROR(InsufficientBands, exit_codes::kEstimator);
CWLAB_DEFINE_ERROR(IoError, exit_codes::kIo);

#undef CWLAB_DEFINE_ERROR

}  // namespace cwlab
