#include "dissolv/inventory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dissolv/error.hpp"
#include "json.hpp"

namespace dissolv {

namespace {

double sum(const std::vector<Quantity>& q) {
  double s = 0.0;
  for (const auto& [_, v] : q) s += v;
  return s;
}

}  // namespace

double InventoryRecord::total_mass() const { return sum(masses); }
double InventoryRecord::total_energy() const { return sum(energies); }

std::vector<std::string> bundled_names() { return {"dissolvpcb", "dissolvpcb-recycling", "fr4"}; }

InventoryRecord bundled_record(std::string_view name) {
  InventoryRecord r;
  r.name = std::string(name);
  if (name == "dissolvpcb") {
    r.side = "DissolvPCB";
    r.masses = {{"PVA filament", 1.17}, {"PVA pellets", 0.013}, {"water", 0.026},
                {"gallium", 0.651},     {"indium", 0.217}};
    r.energies = {{"filament drying", 4.37e-3},
                  {"glue preparation", 1.52e-4},
                  {"EGaIn synthesis", 5.208e-3},
                  {"3D printing", 2.7e-2}};
    r.notes = {"gallium + indium = 0.868 g EGaIn, a 75.0/25.0 split; the alloy recipe quotes 75.5/24.5"};
  } else if (name == "dissolvpcb-recycling") {
    r.side = "DissolvPCB";
    r.masses = {{"water", 135.46}, {"NaOH solution (2 wt%)", 20.0}};
    r.energies = {{"PVA grinding", 2.556e-5}, {"filament extrusion", 4.243e-4}};
    r.recovered = {{"EGaIn", 0.848}, {"PVA", 1.16}};
  } else if (name == "fr4") {
    r.side = "FR4";
    r.masses = {{"FR-4", 2.228}, {"solder paste", 0.628}};
    r.energies = {{"soldering", 7.0e-4}, {"CNC milling", 6.68e-3}};
  } else {
    throw Error(ErrorCode::ConfigError, "unknown inventory bundle '" + std::string(name) + "'");
  }
  return r;
}

void validate(const InventoryRecord& r) {
  for (const auto* list : {&r.masses, &r.energies, &r.recovered}) {
    for (const auto& [item, v] : *list) {
      if (!(v >= 0) || !std::isfinite(v))
        throw Error(ErrorCode::NegativeQuantity, r.name + ": '" + item + "' = " + std::to_string(v));
    }
  }
}

// ---------------------------------------------------------------- factors

std::vector<std::string> FactorTable::indicators() const {
  std::vector<std::string> out;
  for (const auto& row : rows)
    if (std::find(out.begin(), out.end(), row.indicator) == out.end()) out.push_back(row.indicator);
  return out;
}

std::optional<double> FactorTable::factor(std::string_view item, std::string_view indicator) const {
  for (const auto& row : rows)
    if (row.item == item && row.indicator == indicator) return row.factor;
  return std::nullopt;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line, int lineno) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw Error(ErrorCode::ConfigError, "unterminated quote in factor table", lineno);
  out.push_back(cur);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t"), e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? "" : f.substr(b, e - b + 1);
  }
  return out;
}

}  // namespace

FactorTable parse_factor_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  FactorTable t;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    const auto f = split_csv_line(line, lineno);
    if (!header) {
      if (f.size() != 4 || f[0] != "item" || f[1] != "indicator" || f[2] != "factor" || f[3] != "unit")
        throw Error(ErrorCode::ConfigError, "factor table header must be item,indicator,factor,unit", lineno);
      header = true;
      continue;
    }
    if (f.size() != 4) throw Error(ErrorCode::ConfigError, "expected 4 columns", lineno);
    FactorRow row{f[0], f[1], 0.0, f[3]};
    try {
      std::size_t used = 0;
      row.factor = std::stod(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "factor '" + f[2] + "' is not a number", lineno);
    }
    if (!(row.factor >= 0) || !std::isfinite(row.factor))
      throw Error(ErrorCode::NegativeQuantity, "factor for '" + row.item + "' must be non-negative", lineno);
    t.rows.push_back(std::move(row));
  }
  if (!header) throw Error(ErrorCode::ConfigError, "factor table is empty");
  return t;
}

FactorTable load_factor_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_factor_csv(buf.str());
}

// ---------------------------------------------------------------- report

namespace {

SideSummary summarize(const InventoryRecord& r, const std::optional<FactorTable>& factors) {
  validate(r);
  SideSummary s{r, r.total_mass(), r.total_energy(), {}};
  if (!factors) return s;
  for (const auto& ind : factors->indicators()) {
    Impact imp;
    imp.indicator = ind;
    for (const auto& row : factors->rows)
      if (row.indicator == ind) {
        imp.unit = row.unit;
        break;
      }
    double from_mass = 0.0, from_energy = 0.0;
    for (const auto& [item, v] : r.masses) {
      const auto f = factors->factor(item, ind);
      if (!f) imp.unfactored.push_back(item);
      from_mass += f.value_or(0.0) * v;
    }
    for (const auto& [item, v] : r.energies) {
      const auto f = factors->factor(item, ind);
      if (!f) imp.unfactored.push_back(item);
      from_energy += f.value_or(0.0) * v;
    }
    imp.value = from_mass + from_energy;
    s.impacts.push_back(std::move(imp));
  }
  return s;
}

nlohmann::ordered_json quantities(const std::vector<Quantity>& q) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& [item, v] : q) j.push_back({{"item", item}, {"value", v}});
  return j;
}

nlohmann::ordered_json side_json(const SideSummary& s, bool factors) {
  nlohmann::ordered_json j;
  j["name"] = s.record.name;
  j["side"] = s.record.side;
  j["masses_g"] = quantities(s.record.masses);
  j["energies_kwh"] = quantities(s.record.energies);
  if (!s.record.recovered.empty()) j["recovered_g"] = quantities(s.record.recovered);
  j["total_mass_g"] = s.mass_g;
  j["total_energy_kwh"] = s.energy_kwh;
  if (factors) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& imp : s.impacts)
      arr.push_back({{"indicator", imp.indicator}, {"unit", imp.unit}, {"value", imp.value},
                     {"unfactored", imp.unfactored}});
    j["impacts"] = arr;
  }
  if (!s.record.notes.empty()) j["notes"] = s.record.notes;
  return j;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

InventoryReport inventory_report(const InventoryRecord& ours, const InventoryRecord& baseline,
                                 const std::optional<FactorTable>& factors) {
  InventoryReport r;
  r.ours = summarize(ours, factors);
  r.baseline = summarize(baseline, factors);
  r.mass_delta_g = r.ours.mass_g - r.baseline.mass_g;
  r.energy_delta_kwh = r.ours.energy_kwh - r.baseline.energy_kwh;
  r.has_factors = factors.has_value();
  return r;
}

std::string inventory_report_json(const InventoryReport& r) {
  nlohmann::ordered_json j;
  j["ours"] = side_json(r.ours, r.has_factors);
  j["baseline"] = side_json(r.baseline, r.has_factors);
  j["delta"] = {{"mass_g", r.mass_delta_g}, {"energy_kwh", r.energy_delta_kwh}};
  if (!r.has_factors)
    j["impacts_note"] = "no factor table supplied; impact indicators are not computed";
  return j.dump(2) + "\n";
}

std::string inventory_report_table(const InventoryReport& r) {
  std::ostringstream o;
  for (const SideSummary* s : {&r.ours, &r.baseline}) {
    o << s->record.name << " (" << s->record.side << ")\n";
    for (const auto& [item, v] : s->record.masses) o << "  " << item << ": " << num(v) << " g\n";
    for (const auto& [item, v] : s->record.energies) o << "  " << item << ": " << num(v) << " kWh\n";
    for (const auto& [item, v] : s->record.recovered) o << "  recovered " << item << ": " << num(v) << " g\n";
    o << "  total mass: " << num(s->mass_g) << " g\n";
    o << "  total energy: " << num(s->energy_kwh) << " kWh\n";
    for (const auto& imp : s->impacts) o << "  " << imp.indicator << ": " << num(imp.value) << " " << imp.unit << "\n";
    for (const auto& n : s->record.notes) o << "  note: " << n << "\n";
  }
  o << "delta mass: " << num(r.mass_delta_g) << " g\n";
  o << "delta energy: " << num(r.energy_delta_kwh) << " kWh\n";
  return o.str();
}

}  // namespace dissolv
