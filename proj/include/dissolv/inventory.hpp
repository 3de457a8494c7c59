#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dissolv {

using Quantity = std::pair<std::string, double>;

/// Material masses (g) and process energies (kWh) for one fabrication route.
struct InventoryRecord {
  std::string name;
  std::string side;  // "DissolvPCB" or "FR4"
  std::vector<Quantity> masses;
  std::vector<Quantity> energies;
  std::vector<Quantity> recovered;  // outputs, excluded from totals
  std::vector<std::string> notes;

  double total_mass() const;
  double total_energy() const;
};

/// Names accepted by bundled_record: "dissolvpcb", "dissolvpcb-recycling", "fr4".
std::vector<std::string> bundled_names();

/// Throws ConfigError for unknown names.
InventoryRecord bundled_record(std::string_view name);

/// Throws NegativeQuantity for negative or non-finite entries.
void validate(const InventoryRecord& r);

struct FactorRow {
  std::string item;
  std::string indicator;
  double factor = 0.0;  // per gram or per kWh
  std::string unit;
};

struct FactorTable {
  std::vector<FactorRow> rows;
  std::vector<std::string> indicators() const;  // first-appearance order
  std::optional<double> factor(std::string_view item, std::string_view indicator) const;
};

/// CSV with header "item,indicator,factor,unit". Quoted fields are allowed.
FactorTable parse_factor_csv(const std::string& text);
FactorTable load_factor_csv(const std::filesystem::path& path);

struct Impact {
  std::string indicator;
  std::string unit;
  double value = 0.0;
  std::vector<std::string> unfactored;  // items with no factor for this indicator
};

struct SideSummary {
  InventoryRecord record;
  double mass_g = 0.0;
  double energy_kwh = 0.0;
  std::vector<Impact> impacts;  // empty without a factor table
};

struct InventoryReport {
  SideSummary ours;
  SideSummary baseline;
  double mass_delta_g = 0.0;       // ours - baseline
  double energy_delta_kwh = 0.0;
  bool has_factors = false;
};

/// impact = sum(factor * mass) + sum(factor * energy), accumulated in record
/// order so an all-ones table reproduces the totals bit for bit.
InventoryReport inventory_report(const InventoryRecord& ours, const InventoryRecord& baseline,
                                 const std::optional<FactorTable>& factors);

std::string inventory_report_json(const InventoryReport& r);
std::string inventory_report_table(const InventoryReport& r);

}  // namespace dissolv
