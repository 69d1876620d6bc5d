#include "fibersec/experiment_config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace fibersec {

namespace {

using nlohmann::json;

void fail(const std::string& field, const std::string& why) {
  throw std::invalid_argument("config: field '" + field + "' " + why);
}

double get_positive(const json& j, const std::string& field, double fallback) {
  const double v = j.value(field, fallback);
  if (!(v > 0.0)) fail(field, "must be positive");
  return v;
}

AlphaRule parse_alpha(const json& j) {
  if (!j.contains("alpha")) return AlphaRule::auto_scaled();
  const json& a = j.at("alpha");
  if (a.is_string()) {
    if (a.get<std::string>() == "auto") return AlphaRule::auto_scaled();
    fail("link.alpha", "must be \"auto\" or a non-negative number");
  }
  const double v = a.get<double>();
  if (v < 0.0) fail("link.alpha", "must be non-negative");
  return AlphaRule::fixed(v);
}

json alpha_to_json(const AlphaRule& rule) {
  if (rule.kind == AlphaRule::Kind::Auto) return "auto";
  return rule.value;
}

}  // namespace

void ExperimentConfig::validate(const std::filesystem::path& base_dir) const {
  fiber.validate();

  if (matrix.source != "haar" && matrix.source != "coupled" &&
      matrix.source != "file")
    fail("matrix.source", "must be haar, coupled or file");
  if (matrix.source == "file") {
    if (matrix.path.empty()) fail("matrix.path", "required for source = file");
    if (!std::filesystem::exists(base_dir / matrix.path))
      fail("matrix.path", "file not found: " + (base_dir / matrix.path).string());
  }
  if (matrix.dimension < 0) fail("matrix.dimension", "must be >= 0");
  if (matrix.epsilon < 0.0) fail("matrix.epsilon", "must be >= 0");
  if (matrix.measurement_noise < 0.0) fail("matrix.measurement_noise", "must be >= 0");
  if (matrix.eve_source != "same-as-bob" &&
      matrix.eve_source != "independent-haar" && matrix.eve_source != "file")
    fail("matrix.eve_source", "must be same-as-bob, independent-haar or file");
  if (matrix.eve_source == "file") {
    if (matrix.eve_path.empty()) fail("matrix.eve_path", "required for eve_source = file");
    if (!std::filesystem::exists(base_dir / matrix.eve_path))
      fail("matrix.eve_path", "file not found: " + (base_dir / matrix.eve_path).string());
  }

  if (!(tap.rho >= 0.0 && tap.rho <= 1.0)) fail("tap.rho", "must be in [0,1]");
  if (!(tap.sigma_sq_min > 0.0 && tap.sigma_sq_min < 1.0))
    fail("tap.sigma_sq_min", "must be in (0,1)");

  if (link.receiver_noise_std < 0.0) fail("link.receiver_noise_std", "must be >= 0");
  if (!(link.artificial_noise_level >= 0.0 && link.artificial_noise_level <= 1.0))
    fail("link.artificial_noise_level", "must be in [0,1]");

  if (sweep.noise_levels.empty()) fail("sweep.noise_levels", "must be non-empty");
  for (std::size_t i = 0; i < sweep.noise_levels.size(); ++i) {
    if (!(sweep.noise_levels[i] >= 0.0 && sweep.noise_levels[i] <= 1.0))
      fail("sweep.noise_levels", "entries must be in [0,1]");
    if (i > 0 && sweep.noise_levels[i] <= sweep.noise_levels[i - 1])
      fail("sweep.noise_levels", "must be strictly ascending");
  }
  if (sweep.trials < 1) fail("sweep.trials", "must be >= 1");
  if (sweep.threads < 0) fail("sweep.threads", "must be >= 0");

  if (output.directory.empty()) fail("output.directory", "must be non-empty");
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  if (doc.contains("fiber")) {
    const json& f = doc["fiber"];
    cfg.fiber.core_radius = get_positive(f, "core_radius_m", cfg.fiber.core_radius);
    cfg.fiber.numerical_aperture =
        get_positive(f, "numerical_aperture", cfg.fiber.numerical_aperture);
    cfg.fiber.wavelength = get_positive(f, "wavelength_m", cfg.fiber.wavelength);
    cfg.fiber.core_index = get_positive(f, "core_index", cfg.fiber.core_index);
  }
  if (doc.contains("matrix")) {
    const json& m = doc["matrix"];
    cfg.matrix.source = m.value("source", cfg.matrix.source);
    cfg.matrix.dimension = m.value("dimension", cfg.matrix.dimension);
    cfg.matrix.epsilon = m.value("epsilon", cfg.matrix.epsilon);
    cfg.matrix.seed = m.value("seed", cfg.matrix.seed);
    cfg.matrix.path = m.value("path", cfg.matrix.path);
    cfg.matrix.measurement_noise =
        m.value("measurement_noise", cfg.matrix.measurement_noise);
    cfg.matrix.eve_source = m.value("eve_source", cfg.matrix.eve_source);
    cfg.matrix.eve_seed = m.value("eve_seed", cfg.matrix.eve_seed);
    cfg.matrix.eve_path = m.value("eve_path", cfg.matrix.eve_path);
  }
  if (doc.contains("tap")) {
    const json& t = doc["tap"];
    cfg.tap.rho = t.value("rho", cfg.tap.rho);
    cfg.tap.sigma_sq_min = t.value("sigma_sq_min", cfg.tap.sigma_sq_min);
  }
  if (doc.contains("link")) {
    const json& l = doc["link"];
    cfg.link.receiver_noise_std =
        l.value("receiver_noise_std", cfg.link.receiver_noise_std);
    cfg.link.alpha_rule = parse_alpha(l);
    cfg.link.artificial_noise_level =
        l.value("artificial_noise_level", cfg.link.artificial_noise_level);
  }
  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    if (s.contains("noise_levels"))
      cfg.sweep.noise_levels = s["noise_levels"].get<std::vector<double>>();
    cfg.sweep.trials = s.value("trials", cfg.sweep.trials);
    cfg.sweep.base_seed = s.value("base_seed", cfg.sweep.base_seed);
    cfg.sweep.threads = s.value("threads", cfg.sweep.threads);
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    cfg.output.directory = o.value("directory", cfg.output.directory);
    cfg.output.svg = o.value("svg", cfg.output.svg);
  }
  return cfg;
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json doc;
  doc["fiber"] = {{"core_radius_m", cfg.fiber.core_radius},
                  {"numerical_aperture", cfg.fiber.numerical_aperture},
                  {"wavelength_m", cfg.fiber.wavelength},
                  {"core_index", cfg.fiber.core_index}};
  doc["matrix"] = {{"source", cfg.matrix.source},
                   {"dimension", cfg.matrix.dimension},
                   {"epsilon", cfg.matrix.epsilon},
                   {"seed", cfg.matrix.seed},
                   {"path", cfg.matrix.path},
                   {"measurement_noise", cfg.matrix.measurement_noise},
                   {"eve_source", cfg.matrix.eve_source},
                   {"eve_seed", cfg.matrix.eve_seed},
                   {"eve_path", cfg.matrix.eve_path}};
  doc["tap"] = {{"rho", cfg.tap.rho}, {"sigma_sq_min", cfg.tap.sigma_sq_min}};
  doc["link"] = {{"receiver_noise_std", cfg.link.receiver_noise_std},
                 {"alpha", alpha_to_json(cfg.link.alpha_rule)},
                 {"artificial_noise_level", cfg.link.artificial_noise_level}};
  doc["sweep"] = {{"noise_levels", cfg.sweep.noise_levels},
                  {"trials", cfg.sweep.trials},
                  {"base_seed", cfg.sweep.base_seed},
                  {"threads", cfg.sweep.threads}};
  doc["output"] = {{"directory", cfg.output.directory}, {"svg", cfg.output.svg}};
  return doc.dump(1) + "\n";
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("config: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  ExperimentConfig cfg = config_from_json_text(text);
  cfg.validate(path.has_parent_path() ? path.parent_path() : ".");
  return cfg;
}

AssembledLink assemble_link(const ExperimentConfig& config,
                            const std::filesystem::path& base_dir) {
  config.validate(base_dir);

  AssembledLink out;
  out.basis = solve_modes(config.fiber);
  const int n_modes = out.basis.size();
  const int n = config.matrix.dimension > 0 ? config.matrix.dimension : n_modes;

  ComplexMatrix t_ab;
  if (config.matrix.source == "haar") {
    t_ab = haar_unitary(n, config.matrix.seed);
  } else if (config.matrix.source == "coupled") {
    t_ab = coupled_unitary(n, config.matrix.epsilon, config.matrix.seed);
  } else {
    t_ab = load_matrix(base_dir / config.matrix.path);
  }
  if (t_ab.rows() != n_modes)
    throw std::invalid_argument(
        "config: transmission matrix dimension " + std::to_string(t_ab.rows()) +
        " does not match the solved mode count " + std::to_string(n_modes));
  if (config.matrix.measurement_noise > 0.0)
    t_ab = emulate_measurement(t_ab, config.matrix.measurement_noise,
                               derive_seed(config.matrix.seed, kMeasurementSeedTag));

  ComplexMatrix t_ae;
  if (config.matrix.eve_source == "same-as-bob") {
    t_ae = t_ab;
  } else if (config.matrix.eve_source == "independent-haar") {
    t_ae = haar_unitary(n_modes, config.matrix.eve_seed);
  } else {
    t_ae = load_matrix(base_dir / config.matrix.eve_path);
    if (t_ae.rows() != n_modes)
      throw std::invalid_argument("config: eve matrix dimension mismatch");
  }

  out.link.t_ab = std::move(t_ab);
  out.link.t_ae = std::move(t_ae);
  out.link.tap = build_tap_matrix(out.basis, config.tap.rho, config.tap.sigma_sq_min);
  out.link.receiver_noise_std = config.link.receiver_noise_std;
  out.link.alpha_rule = config.link.alpha_rule;
  out.link.artificial_noise_level = config.link.artificial_noise_level;
  out.link.validate();
  return out;
}

}  // namespace fibersec
