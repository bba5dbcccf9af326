#include "pgsearch/probmap.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "pgsearch/rng.hpp"

namespace pgsearch {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

double gaussian_density(const GaussianComponent& c, double x, double y) {
  const double zx = (x - c.mean.first) / c.sigma.first;
  const double zy = (y - c.mean.second) / c.sigma.second;
  const double norm = 1.0 / (2.0 * std::numbers::pi * c.sigma.first * c.sigma.second);
  return norm * std::exp(-0.5 * (zx * zx + zy * zy));
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

GaussianMixture::GaussianMixture(std::vector<GaussianComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw ContractViolation("mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.sigma.first > 0.0) || !(c.sigma.second > 0.0)) {
      throw ContractViolation("mixture sigma must be positive");
    }
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) throw ContractViolation("mixture weight must be positive");
    if (!std::isfinite(c.mean.first) || !std::isfinite(c.mean.second)) {
      throw ContractViolation("mixture mean must be finite");
    }
    total += c.weight;
  }
  for (auto& c : components_) c.weight /= total;
}

double GaussianMixture::density(double x, double y) const {
  double d = 0.0;
  for (const auto& c : components_) d += c.weight * gaussian_density(c, x, y);
  return d;
}

ProbabilityMap::ProbabilityMap(GridSpec spec, std::vector<double> values) : spec_(spec), q_(std::move(values)) {
  if (q_.size() != spec_.cells()) throw ContractViolation("map value count does not match grid size");
  for (double v : q_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ContractViolation("map values must be finite and nonnegative");
  }
}

ProbabilityMap ProbabilityMap::zeros(GridSpec spec) { return ProbabilityMap(spec, std::vector<double>(spec.cells())); }

void ProbabilityMap::set(Cell c, double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw ContractViolation("map values must be finite and nonnegative");
  q_[spec_.index(c)] = value;
}

ProbabilityMap generate_map(const GaussianMixture& mixture, const GridSpec& spec, std::uint64_t /*seed*/) {
  std::vector<double> q(spec.cells());
  double total = 0.0;
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double d = mixture.density(x, y);
      q[spec.index({x, y})] = d;
      total += d;
    }
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw EmptyDensityError("mixture has no mass on the grid");
  }
  for (double& v : q) v /= total;
  return ProbabilityMap(spec, std::move(q));
}

GaussianMixture random_mixture(int num_components, const GridSpec& spec, std::uint64_t seed) {
  if (num_components < 1) throw ContractViolation("random_mixture needs at least one component");
  Rng rng(derive_seed(seed, {0x6d6978ULL}));
  const double sigma_lo = spec.width / 15.0;
  const double sigma_hi = spec.width / 5.0;
  std::vector<GaussianComponent> comps;
  comps.reserve(static_cast<std::size_t>(num_components));
  for (int i = 0; i < num_components; ++i) {
    GaussianComponent c;
    c.mean = {uniform(rng, 0.0, spec.width), uniform(rng, 0.0, spec.height)};
    c.sigma = {uniform(rng, sigma_lo, sigma_hi), uniform(rng, sigma_lo, sigma_hi)};
    // Flat Dirichlet via normalized unit exponentials; 1 - u keeps the log argument positive.
    c.weight = -std::log(1.0 - uniform01(rng));
    if (!(c.weight > 0.0)) c.weight = 0x1.0p-53;
    comps.push_back(c);
  }
  return GaussianMixture(std::move(comps));
}

double remaining_mass(const ProbabilityMap& map) {
  double s = 0.0;
  for (double v : map.values()) s += v;
  return s;
}

std::string map_to_csv(const ProbabilityMap& map) {
  const auto& spec = map.spec();
  std::string out;
  out.reserve(spec.cells() * 12);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      if (x > 0) out += ',';
      out += format_double(map.at(Cell{x, y}));
    }
    out += '\n';
  }
  return out;
}

ProbabilityMap map_from_csv(const std::string& text, double cell_size) {
  std::vector<double> values;
  int width = -1;
  int row = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    int col = 0;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
      while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      double v = 0.0;
      auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      const std::string where = "row " + std::to_string(row) + ", column " + std::to_string(col);
      if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw ParseError("non-numeric map value at " + where);
      }
      if (!std::isfinite(v)) throw ParseError("non-finite map value at " + where);
      if (v < 0.0) throw ParseError("negative map value at " + where);
      values.push_back(v);
      ++col;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (width < 0) {
      width = col;
    } else if (col != width) {
      throw ParseError("row " + std::to_string(row) + " has " + std::to_string(col) + " columns, expected " +
                       std::to_string(width));
    }
    ++row;
  }
  if (row == 0) throw ParseError("empty map file");
  return ProbabilityMap(GridSpec(width, row, cell_size), std::move(values));
}

void save_map(const ProbabilityMap& map, const std::filesystem::path& path) { write_file(path, map_to_csv(map)); }

ProbabilityMap load_map(const std::filesystem::path& path, double cell_size) {
  return map_from_csv(read_file(path), cell_size);
}

std::string mixture_to_json(const GaussianMixture& mixture) {
  nlohmann::json j;
  j["components"] = nlohmann::json::array();
  for (const auto& c : mixture.components()) {
    j["components"].push_back({{"mean", {c.mean.first, c.mean.second}},
                               {"sigma", {c.sigma.first, c.sigma.second}},
                               {"weight", c.weight}});
  }
  return j.dump(2) + "\n";
}

GaussianMixture mixture_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("mixture file is not valid JSON: ") + e.what());
  }
  if (!j.contains("components") || !j["components"].is_array()) {
    throw ParseError("mixture file needs a 'components' array");
  }
  std::vector<GaussianComponent> comps;
  std::size_t i = 0;
  for (const auto& c : j["components"]) {
    const std::string where = "component " + std::to_string(i++);
    auto pair = [&](const char* key) {
      if (!c.contains(key) || !c[key].is_array() || c[key].size() != 2 || !c[key][0].is_number() ||
          !c[key][1].is_number()) {
        throw ParseError(where + ": '" + key + "' must be a pair of numbers");
      }
      return std::pair<double, double>{c[key][0].get<double>(), c[key][1].get<double>()};
    };
    GaussianComponent comp;
    comp.mean = pair("mean");
    comp.sigma = pair("sigma");
    if (!c.contains("weight") || !c["weight"].is_number()) throw ParseError(where + ": 'weight' must be a number");
    comp.weight = c["weight"].get<double>();
    comps.push_back(comp);
  }
  try {
    return GaussianMixture(std::move(comps));
  } catch (const ContractViolation& e) {
    throw ParseError(std::string("invalid mixture: ") + e.what());
  }
}

void save_mixture(const GaussianMixture& mixture, const std::filesystem::path& path) {
  write_file(path, mixture_to_json(mixture));
}

GaussianMixture load_mixture(const std::filesystem::path& path) { return mixture_from_json(read_file(path)); }

ProbabilityMap ring_map(const GridSpec& spec, std::pair<double, double> center, double radius, double width) {
  if (!(width > 0.0)) throw ContractViolation("ring width must be positive");
  std::vector<double> q(spec.cells());
  double total = 0.0;
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double r = std::hypot(x - center.first, y - center.second);
      const double z = (r - radius) / width;
      const double v = std::exp(-0.5 * z * z);
      q[spec.index({x, y})] = v;
      total += v;
    }
  }
  if (!(total > 0.0)) throw EmptyDensityError("ring has no mass on the grid");
  for (double& v : q) v /= total;
  return ProbabilityMap(spec, std::move(q));
}

}  // namespace pgsearch
