#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "contactlab/error.hpp"
#include "contactlab/io/experiment.hpp"

namespace contactlab {
namespace {

constexpr int kOk = 0, kOther = 1, kInvalid = 2, kNumerical = 3;

// Creates the directory and proves it is writable without leaving files behind.
void prepare_output(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("output_dir", "cannot create " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".contactlab-probe";
  {
    std::ofstream out(probe);
    if (!out) throw ValidationError("output_dir", dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"contactlab: contact-interaction numerical experiments"};
  std::string command, config_path, out;
  std::uint64_t seed = 0;
  app.add_option("command", command, "twobody | resonance | contact-spectrum | critical | gp-groundstate | "
                                     "gp-evolve | sweep | bs-kernel | cross-term")
      ->required();
  app.add_option("--config", config_path, "JSON config file")->required();
  auto* out_opt = app.add_option("--out", out, "output directory (overrides output_dir)");
  auto* seed_opt = app.add_option("--seed", seed, "seed (overrides the config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    const Command cmd = command_from_string(command);
    Json doc = load_config_file(config_path);
    if (!doc.is_object()) throw ValidationError("config_type", "config must be a JSON object");
    if (*out_opt) doc["output_dir"] = out;
    if (*seed_opt) doc["seed"] = seed;
    const auto cfg = resolve_config(doc, cmd);
    prepare_output(cfg.output_dir);
    const auto report = run_experiment(cfg);
    emit_report(report, cfg.output_dir);
    if (report.status != "ok") {
      std::cerr << "numerical failure: " << report.error.value("message", "") << "\n";
      return kNumerical;
    }
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << cfg.output_dir << "/report.json\n";
    return kOk;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const FormatError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
}

}  // namespace contactlab
