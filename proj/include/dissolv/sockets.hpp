#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dissolv/geom.hpp"
#include "dissolv/pcb_model.hpp"
#include "dissolv/process.hpp"

namespace dissolv {

enum class SocketKind { TwoTerminal, LeadedSmd, ThroughHole };

struct BodyDims {
  double l = 0.0;  // along the footprint X axis
  double w = 0.0;
  double h = 0.0;
};

struct SocketSpec {
  std::string package;               // library key, e.g. "R0805"
  std::vector<std::string> aliases;  // substrings matched against lib_id
  SocketKind kind = SocketKind::TwoTerminal;
  BodyDims body;
  int pins = 0;                 // 0 accepts any pin count
  double pitch = 0.0;           // leaded packages
  std::optional<double> end_clearance;  // two-terminal; unset uses the process value
  double recess_depth = 0.15;   // leaded SMD body cradle
  double pin_diameter = 1.0;    // through-hole pin cavity
  bool insertion_side_only = true;
};

class SocketLibrary {
 public:
  SocketLibrary() = default;
  explicit SocketLibrary(std::vector<SocketSpec> specs);

  /// Longest alias contained in lib_id wins; ties break on package key.
  const SocketSpec* match(std::string_view lib_id) const;
  const SocketSpec* find(std::string_view package) const;
  const std::vector<SocketSpec>& specs() const { return specs_; }

 private:
  std::vector<SocketSpec> specs_;
};

/// Parses the socket JSON document. Malformed entries raise ConfigError.
SocketLibrary socket_library_from_json(const std::string& text);
SocketLibrary load_socket_library(const std::filesystem::path& path);

/// Path of the library shipped in the data directory.
std::filesystem::path default_socket_library_path();

/// Cavities cut into the body for one footprint. Throws UnknownPackage or
/// PinCountMismatch.
std::vector<geom::Solid> socket_solids(const FootprintInst& fp, const SocketLibrary& lib, const Stackup& stackup,
                                       const ProcessParams& params);

}  // namespace dissolv
