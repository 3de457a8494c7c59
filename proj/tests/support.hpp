#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dissolv/pcb_model.hpp"
#include "dissolv/sexpr.hpp"

namespace dissolv::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(DISSOLV_FIXTURE_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Two-layer board, 40 x 20 mm at (100, 100), with nets A and B; `body`
/// is spliced in before the closing paren.
inline std::string board_text(const std::string& body) {
  return "(kicad_pcb (version 20221018) (generator test)\n"
         "  (layers (0 \"F.Cu\" signal) (31 \"B.Cu\" signal) (44 \"Edge.Cuts\" user))\n"
         "  (net 0 \"\") (net 1 \"A\") (net 2 \"B\")\n"
         "  (gr_rect (start 100 100) (end 140 120) (layer \"Edge.Cuts\") (width 0.1))\n" +
         body + ")\n";
}

inline PcbDesign board(const std::string& body) { return extract_design(sexpr::parse(board_text(body))); }

inline std::string segment(double x0, double y0, double x1, double y1, double w, int net,
                           const char* layer = "F.Cu") {
  std::ostringstream s;
  s.precision(17);
  s << "(segment (start " << x0 << " " << y0 << ") (end " << x1 << " " << y1 << ") (width " << w
    << ") (layer \"" << layer << "\") (net " << net << "))\n";
  return s.str();
}

inline std::string via(double x, double y, double d, int net) {
  std::ostringstream s;
  s.precision(17);
  s << "(via (at " << x << " " << y << ") (size " << d << ") (drill 0.6) (layers \"F.Cu\" \"B.Cu\") (net " << net
    << "))\n";
  return s.str();
}

/// Relative closeness for values away from zero.
inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace dissolv::testing
