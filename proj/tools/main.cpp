// rhythmwalk CLI: generate walker traces, sonify them to MIDI, calibrate
// coin-angle bounds, and expose the reference oracles for inspection.
//
// Exit codes: 0 success, 2 configuration/parse problems, 3 calibration
// failure, 4 file I/O failure, 1 anything unexpected.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rhythmwalk/config.hpp"
#include "rhythmwalk/oracle.hpp"
#include "rhythmwalk/pipeline.hpp"
#include "rhythmwalk/trace.hpp"

namespace {

using namespace rhythmwalk;

struct GenerateArgs {
  std::string config_path;
  std::string out_path = "trace.json";
  std::optional<std::uint64_t> seed;
};

int cmd_generate(const GenerateArgs& args) {
  RunConfig config = load_config(args.config_path);
  if (args.seed) config.seed = *args.seed;
  const GenerateResult result = run_generate(config);
  save_trace(args.out_path, result.trace);

  std::cout << std::setprecision(6) << std::fixed;
  if (result.calibration) {
    const CalibrationResult& cal = *result.calibration;
    std::cout << "calibrated bounds: phi [" << cal.bounds.phi_min << ", "
              << cal.bounds.phi_max << "], theta [" << cal.bounds.theta_min
              << ", " << cal.bounds.theta_max << "]\n"
              << "  max pair drift " << cal.max_pair.drift << " ("
              << cal.max_pair.iterations << " iterations), min pair drift "
              << cal.min_pair.drift << " (" << cal.min_pair.iterations
              << " iterations)\n";
  }
  const TraceSummary& s = result.summary;
  std::cout << "segments: " << s.segments << "\n"
            << "mean displacement: (" << s.mean_cell_displacement.x << ", "
            << s.mean_cell_displacement.y << ") cells = ("
            << s.mean_pixel_displacement.x << ", "
            << s.mean_pixel_displacement.y << ") px\n"
            << "final position: (" << s.final_position.x << ", "
            << s.final_position.y << ")\n";
  if (s.distance_to_center)
    std::cout << "distance to field center: " << *s.distance_to_center << "\n";
  if (s.orbit_sign_consistency)
    std::cout << "angular momentum sign consistency: "
              << *s.orbit_sign_consistency << "\n";
  std::cout << "trace written to " << args.out_path << "\n";
  return 0;
}

struct SonifyArgs {
  std::string config_path;
  std::string trace_path = "trace.json";
  std::string out_path = "out.mid";
};

int cmd_sonify(const SonifyArgs& args) {
  const RunConfig config = load_config(args.config_path);
  const TraceDocument trace = load_trace(args.trace_path);
  const SonifyResult result = run_sonify(trace, config);
  write_bytes(args.out_path, result.midi);

  std::map<int, int> histogram;
  for (const Event& event : result.sequence.steps)
    for (const Onset& onset : event) ++histogram[onset.note];
  std::cout << "slots: " << result.sequence.steps.size() << "\n";
  std::cout << "instrument histogram:\n";
  for (const auto& [note, count] : histogram)
    std::cout << "  note " << note << ": " << count << "\n";
  std::cout << "midi written to " << args.out_path << " ("
            << result.midi.size() << " bytes)\n";
  return 0;
}

struct CalibrateArgs {
  std::string config_path;
  std::string out_path = "bounds.json";
  std::optional<double> target;
  std::optional<double> learning_rate;
  std::optional<int> max_iterations;
  std::optional<double> tolerance;
};

nlohmann::json calibration_to_json(const CalibrationResult& result,
                                   double target, bool converged) {
  auto pair_to_json = [](const CalibratedPair& p) {
    return nlohmann::json{{"theta", p.theta},
                          {"phi", p.phi},
                          {"drift", p.drift},
                          {"residual_cost", p.cost},
                          {"iterations", p.iterations},
                          {"converged", p.converged}};
  };
  return {{"target", target},
          {"converged", converged},
          {"bounds",
           {{"phi_min", result.bounds.phi_min},
            {"phi_max", result.bounds.phi_max},
            {"theta_min", result.bounds.theta_min},
            {"theta_max", result.bounds.theta_max}}},
          {"max_pair", pair_to_json(result.max_pair)},
          {"min_pair", pair_to_json(result.min_pair)}};
}

int cmd_calibrate(const CalibrateArgs& args) {
  CalibrationSpec spec;
  if (!args.config_path.empty()) {
    const RunConfig config = load_config(args.config_path);
    if (const auto* cal = std::get_if<CalibrationSpec>(&config.bounds))
      spec = *cal;
  }
  if (args.target) spec.target_drift_probability = *args.target;
  if (args.learning_rate) spec.learning_rate = *args.learning_rate;
  if (args.max_iterations) spec.max_iterations = *args.max_iterations;
  if (args.tolerance) spec.tolerance = *args.tolerance;
  spec.validate();  // domain check before any descent

  auto report = [&](const CalibrationResult& result, bool converged) {
    std::cout << std::setprecision(6) << std::fixed << "bounds: phi ["
              << result.bounds.phi_min << ", " << result.bounds.phi_max
              << "], theta [" << result.bounds.theta_min << ", "
              << result.bounds.theta_max << "]\n"
              << "max pair drift " << result.max_pair.drift
              << " (residual cost " << std::setprecision(3)
              << std::scientific << result.max_pair.cost << std::fixed
              << std::setprecision(6) << ", " << result.max_pair.iterations
              << " iterations)\n"
              << "min pair drift " << result.min_pair.drift
              << " (residual cost " << std::setprecision(3)
              << std::scientific << result.min_pair.cost << std::fixed
              << std::setprecision(6) << ", " << result.min_pair.iterations
              << " iterations)\n";
    const nlohmann::json doc = calibration_to_json(
        result, spec.target_drift_probability, converged);
    std::ofstream out(args.out_path);
    if (!out) throw IoError("cannot open output file: " + args.out_path);
    out << doc.dump(2) << '\n';
    std::cout << "bounds written to " << args.out_path << "\n";
  };

  try {
    const CalibrationResult result = calibrate_bounds(spec);
    report(result, true);
    return 0;
  } catch (const CalibrationError& e) {
    std::cerr << "warning: " << e.what() << " (best-found bounds written)\n";
    report(e.best, false);
    return 3;
  }
}

int cmd_oracle_distribution(int steps, double theta, double phi,
                            const std::string& out_path) {
  const oracle::WalkDistribution dist =
      oracle::walk_distribution(theta, phi, steps);
  std::cout << std::setprecision(12) << std::fixed;
  double sum = 0.0;
  for (int d = -dist.steps; d <= dist.steps; ++d) {
    std::cout << std::setw(4) << d << "  " << dist.probability_of(d) << "\n";
    sum += dist.probability_of(d);
  }
  std::cout << "sum " << sum << "\n"
            << "positive drift " << dist.positive_drift() << "\n"
            << "mean " << dist.mean() << "\n";
  if (!out_path.empty()) {
    nlohmann::json doc = {{"steps", dist.steps},
                          {"probabilities", dist.probabilities},
                          {"positive_drift", dist.positive_drift()},
                          {"mean", dist.mean()}};
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open output file: " + out_path);
    out << doc.dump(2) << '\n';
  }
  return 0;
}

int cmd_oracle_decompose(int trials, std::uint64_t seed,
                         const std::string& out_path) {
  const double dev = oracle::decompose_max_deviation(trials, seed);
  std::cout << std::setprecision(3) << std::scientific
            << "max amplitude deviation over " << trials << " random states: "
            << dev << "\n";
  if (!out_path.empty()) {
    nlohmann::json doc = {{"trials", trials}, {"max_deviation", dev}};
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open output file: " + out_path);
    out << doc.dump(2) << '\n';
  }
  return 0;
}

int cmd_oracle_gradient_table(const std::string& config_path, double h,
                              const std::string& out_path) {
  PotentialField field = GaussianPotential{};  // amplitude 100, sigma 100
  if (!config_path.empty()) field = load_config(config_path).field;
  std::vector<Vec2> points;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      points.push_back({50.0 + 100.0 * i, 50.0 + 100.0 * j});
  const auto rows = oracle::gradient_table(field, points, h);
  std::cout << std::setprecision(6) << std::scientific
            << "x        y        fd_gx          fd_gy          exact_gx       "
               "exact_gy       rel_error\n";
  double worst = 0.0;
  for (const auto& r : rows) {
    std::cout << std::setw(8) << std::fixed << std::setprecision(1) << r.x
              << " " << std::setw(8) << r.y << " " << std::scientific
              << std::setprecision(6) << r.fd.gx << " " << r.fd.gy << " "
              << r.analytic.gx << " " << r.analytic.gy << " " << r.rel_error
              << "\n";
    worst = std::max(worst, r.rel_error);
  }
  std::cout << "max relative error " << worst << "\n";
  if (!out_path.empty()) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& r : rows)
      doc.push_back({{"x", r.x},
                     {"y", r.y},
                     {"fd", {r.fd.gx, r.fd.gy}},
                     {"analytic", {r.analytic.gx, r.analytic.gy}},
                     {"rel_error", r.rel_error}});
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open output file: " + out_path);
    out << doc.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-walk rhythm generator"};
  app.require_subcommand(1);
  int rc = 0;

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "run the feedback loop and write a trace");
  generate->add_option("--config", gen.config_path, "run configuration (JSON)")
      ->required();
  generate->add_option("--seed", gen.seed, "override the config seed");
  generate->add_option("--out", gen.out_path, "trace output path");
  generate->callback([&] { rc = cmd_generate(gen); });

  SonifyArgs son;
  auto* sonify = app.add_subcommand("sonify", "turn a trace into a MIDI file");
  sonify->add_option("--config", son.config_path, "run configuration (JSON)")
      ->required();
  sonify->add_option("--trace", son.trace_path, "trace input path");
  sonify->add_option("--out", son.out_path, "MIDI output path");
  std::uint64_t sonify_seed_unused = 0;
  sonify->add_option("--seed", sonify_seed_unused,
                     "accepted for interface symmetry; output is seed-independent");
  sonify->callback([&] { rc = cmd_sonify(son); });

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "gradient-descend the angle bounds");
  calibrate->add_option("--config", cal.config_path,
                        "run configuration holding a bounds.calibrate block");
  calibrate->add_option("--target", cal.target, "target drift probability");
  calibrate->add_option("--learning-rate", cal.learning_rate, "descent step scale");
  calibrate->add_option("--max-iterations", cal.max_iterations, "iteration cap");
  calibrate->add_option("--tolerance", cal.tolerance, "cost convergence threshold");
  calibrate->add_option("--out", cal.out_path, "bounds output path");
  calibrate->callback([&] { rc = cmd_calibrate(cal); });

  auto* oracle_cmd = app.add_subcommand("oracle", "reference oracles and diagnostics");
  oracle_cmd->require_subcommand(1);

  int dist_steps = 3;
  double dist_theta = 0.0, dist_phi = 0.0;
  std::string dist_out;
  auto* distribution = oracle_cmd->add_subcommand(
      "distribution", "exact displacement distribution by path summation");
  distribution->add_option("--steps", dist_steps, "walk steps");
  distribution->add_option("--theta", dist_theta, "coin polar angle")->required();
  distribution->add_option("--phi", dist_phi, "coin phase angle");
  distribution->add_option("--out", dist_out, "also write JSON here");
  distribution->callback(
      [&] { rc = cmd_oracle_distribution(dist_steps, dist_theta, dist_phi, dist_out); });

  int dec_trials = 100;
  std::uint64_t dec_seed = 12345;
  std::string dec_out;
  auto* decompose = oracle_cmd->add_subcommand(
      "decompose-check", "compare the 2D step against the tensor product of 1D steps");
  decompose->add_option("--trials", dec_trials, "random states to test");
  decompose->add_option("--seed", dec_seed, "random state seed");
  decompose->add_option("--out", dec_out, "also write JSON here");
  decompose->callback([&] { rc = cmd_oracle_decompose(dec_trials, dec_seed, dec_out); });

  std::string grad_config, grad_out;
  double grad_h = 1e-3;
  auto* gradient = oracle_cmd->add_subcommand(
      "gradient-table", "finite-difference vs analytic field gradients");
  gradient->add_option("--config", grad_config, "take the field from this config");
  gradient->add_option("--step", grad_h, "finite-difference step (pixels)");
  gradient->add_option("--out", grad_out, "also write JSON here");
  gradient->callback(
      [&] { rc = cmd_oracle_gradient_table(grad_config, grad_h, grad_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const rhythmwalk::CalibrationError& e) {
    std::cerr << "calibration error: " << e.what() << "\n";
    return 3;
  } catch (const rhythmwalk::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const rhythmwalk::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const rhythmwalk::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rhythmwalk::StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
