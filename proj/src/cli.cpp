#include "morphogrid/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>

#include "morphogrid/error.hpp"
#include "morphogrid/io.hpp"
#include "morphogrid/pipeline.hpp"
#include "morphogrid/registration.hpp"
#include "morphogrid/synthetic.hpp"

namespace morphogrid::cli {

namespace {

namespace fs = std::filesystem;

std::string baseline_tag(Baseline b) {
  return std::to_string(b.from + 1) + "-" + std::to_string(b.to + 1);
}

std::string ingest_timestamp() {
  const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
  if (epoch == nullptr || *epoch == '\0') return {};
  char* end = nullptr;
  const long long seconds = std::strtoll(epoch, &end, 10);
  if (end == nullptr || *end != '\0') return {};
  const std::time_t t = static_cast<std::time_t>(seconds);
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Appends settings from `--config <file>` for every flag not given
// explicitly. Keys are long flag names without the dashes.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw MorphoError(ErrorCode::kParse, "config '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw MorphoError(ErrorCode::kSchema, "config '" + path + "' must be a JSON object");
  const auto scalar = [&](const nlohmann::json& v, const std::string& key) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    throw MorphoError(ErrorCode::kSchema, "config key '" + key + "' has an unsupported value");
  };
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    if (has_flag(args, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& item : value) {
        args.push_back(flag);
        args.push_back(scalar(item, key));
      }
    } else {
      args.push_back(flag);
      args.push_back(scalar(value, key));
    }
  }
  return args;
}

void write_output(const fs::path& path, std::string_view text, std::ostream& err) {
  write_text_file(path, text);
  err << "wrote " << path.string() << "\n";
}

Dataset load_input(const std::string& path) {
  if (!fs::exists(path)) throw MorphoError(ErrorCode::kInvalidArgument, "input '" + path + "' does not exist");
  return load_dataset(path);
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-point registration, trend-surface fits and transformation grids for landmark data",
               "morphogrid"};
  app.require_subcommand(1);

  // ingest
  std::vector<std::string> ingest_inputs;
  std::vector<std::string> ingest_groups;
  std::string ingest_output;
  auto* ingest = app.add_subcommand("ingest", "Convert TPS/CSV/JSON landmark files to the canonical dataset");
  ingest->add_option("inputs", ingest_inputs, "Input files (.tps, .csv, .json)")->required();
  ingest->add_option("-o,--output", ingest_output, "Output dataset (.json)")->required();
  ingest->add_option("--groups", ingest_groups, "Group tag per input file")->delimiter(',');

  // average
  std::string avg_input;
  std::string avg_group;
  std::string avg_output;
  bool avg_group_set = false;
  auto* average = app.add_subcommand("average", "Procrustes (GPA) mean per group");
  average->add_option("input", avg_input, "Dataset")->required();
  auto* avg_group_opt = average->add_option("--group", avg_group, "Group tag (default: every group)");
  average->add_option("-o,--output", avg_output, "Output dataset of means (.json)")->required();

  // twopoint
  std::string tp_input;
  std::string tp_baseline;
  std::string tp_output;
  std::string tp_outdir;
  bool tp_means = false;
  std::vector<std::string> tp_targets;
  auto* twopoint = app.add_subcommand("twopoint", "Two-point (baseline) registration");
  twopoint->add_option("input", tp_input, "Dataset")->required();
  twopoint->add_option("--baseline", tp_baseline, "1-based landmark pair 'i,j'")->required();
  twopoint->add_flag("--means", tp_means, "Register per-group GPA means instead of specimens");
  twopoint->add_option("--targets", tp_targets, "Template and target group for the overlay")->delimiter(',');
  twopoint->add_option("-o,--output", tp_output, "Registered dataset (.json)");
  twopoint->add_option("--outdir", tp_outdir, "Directory for the overlay SVG");

  // survey
  std::string sv_input;
  std::vector<std::string> sv_targets;
  std::string sv_outdir;
  auto* survey = app.add_subcommand("survey", "Two-point overlays on every possible baseline");
  survey->add_option("input", sv_input, "Dataset")->required();
  survey->add_option("--targets", sv_targets, "Template and target group 'g1,g2'")->delimiter(',');
  survey->add_option("--outdir", sv_outdir, "Output directory")->required();

  // rotations
  std::string rot_input;
  RotationOptions rot_options;
  std::string rot_outdir;
  auto* rotations = app.add_subcommand("rotations", "Segment rotations between group means");
  rotations->add_option("input", rot_input, "Dataset")->required();
  rotations->add_option("--threshold", rot_options.threshold, "Minimum |rotation| in radians")
      ->capture_default_str();
  rotations->add_flag("--nonaffine", rot_options.nonaffine, "Remove the uniform component first");
  rotations->add_option("--targets", rot_options.groups, "Template and target group 'g1,g2'")->delimiter(',');
  rotations->add_option("--outdir", rot_outdir, "Directory for the network SVG");

  // fit
  std::string fit_input;
  FitOptions fit_options;
  std::string fit_baseline;
  std::string fit_trim = "template";
  std::vector<std::string> fit_extend;
  std::string fit_outdir;
  auto* fit = app.add_subcommand("fit", "Polynomial trend fit with four-panel grid composite");
  fit->add_option("input", fit_input, "Dataset")->required();
  fit->add_option("--degree", fit_options.degree, "Polynomial degree")->required()->check(CLI::Range(1, 3));
  fit->add_option("--baseline", fit_baseline, "1-based landmark pair 'i,j'")->required();
  fit->add_option("--targets", fit_options.groups, "Template and target group 'g1,g2'")->delimiter(',');
  fit->add_option("--trim", fit_trim, "Trim by template preimages or target images")
      ->check(CLI::IsMember({"template", "target"}))
      ->capture_default_str();
  fit->add_flag("--hull", fit_options.hull, "Trim to the convex hull instead of the landmark cycle");
  fit->add_option("--extend", fit_extend, "Extend the trend grid, e.g. left:2.0 (repeatable)");
  fit->add_option("--cells", fit_options.cells, "Grid cells along the longer axis")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit->add_option("--margin", fit_options.margin, "Grid margin as a fraction of the landmark box")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fit->add_option("--samples", fit_options.samples_per_edge, "Points per cell edge")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  fit->add_option("--outdir", fit_outdir, "Output directory")->required();

  // demo
  std::string demo_kind;
  std::string demo_outdir;
  auto* demo = app.add_subcommand("demo", "Prototype and synthetic datasets with figures");
  demo->add_option("kind", demo_kind, "parallelogram|rotated_parallelogram|trapezoid|kite|synthetic-vilmann")
      ->required()
      ->check(CLI::IsMember(
          {"parallelogram", "rotated_parallelogram", "trapezoid", "kite", "synthetic-vilmann"}));
  demo->add_option("--outdir", demo_outdir, "Output directory")->required();

  try {
    args = merge_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  } catch (const MorphoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  avg_group_set = avg_group_opt->count() > 0;

  try {
    if (ingest->parsed()) {
      if (!ingest_groups.empty() && ingest_groups.size() != ingest_inputs.size()) {
        throw MorphoError(ErrorCode::kInvalidArgument, "--groups needs one tag per input file");
      }
      std::vector<LandmarkConfiguration> configs;
      std::map<std::string, std::string> groups;
      std::map<std::string, std::string> metadata;
      Dataset merged;
      for (std::size_t f = 0; f < ingest_inputs.size(); ++f) {
        const Dataset part = load_input(ingest_inputs[f]);
        for (const auto& config : part.sample.configurations()) {
          if (groups.count(config.name()) ||
              std::any_of(configs.begin(), configs.end(),
                          [&](const auto& c) { return c.name() == config.name(); })) {
            throw MorphoError(ErrorCode::kInvalidArgument,
                              "configuration '" + config.name() + "' appears more than once");
          }
          std::string tag = part.sample.group_of(config.name());
          if (!ingest_groups.empty()) {
            tag = ingest_groups[f];
          } else if (ingest_inputs.size() > 1 && tag.empty()) {
            tag = fs::path(ingest_inputs[f]).stem().string();
          }
          if (!tag.empty()) groups[config.name()] = tag;
          configs.push_back(config);
        }
        metadata.insert(part.sample.metadata().begin(), part.sample.metadata().end());
        for (const auto& src : part.provenance.sources) merged.provenance.sources.push_back(src);
      }
      merged.sample = Sample(std::move(configs), std::move(groups), std::move(metadata));
      merged.provenance.ingested = ingest_timestamp();
      write_output(ingest_output, write_dataset(merged), err);
      err << "ingested " << merged.sample.size() << " configurations of "
          << merged.sample.landmark_count() << " landmarks\n";
      return kExitOk;
    }

    if (average->parsed()) {
      const Dataset data = load_input(avg_input);
      const auto tags = avg_group_set ? std::vector<std::string>{avg_group} : data.sample.group_tags();
      std::vector<LandmarkConfiguration> means;
      std::map<std::string, std::string> groups;
      for (const auto& tag : tags) {
        const Sample group = data.sample.select_group(tag);
        if (group.empty()) throw MorphoError(ErrorCode::kInvalidArgument, "no configurations in group '" + tag + "'");
        const GpaResult gpa = generalized_procrustes(group);
        const std::string name = tag.empty() ? "mean" : "mean_" + tag;
        means.emplace_back(name, gpa.mean.landmarks(), Units::kProcrustes);
        if (!tag.empty()) groups[name] = tag;
        err << "group '" << tag << "': " << group.size() << " configurations, converged in "
            << gpa.iterations << " iterations\n";
      }
      Dataset result;
      result.sample = Sample(std::move(means), std::move(groups), data.sample.metadata());
      result.provenance = data.provenance;
      write_output(avg_output, write_dataset(result), err);
      return kExitOk;
    }

    if (twopoint->parsed()) {
      const Dataset data = load_input(tp_input);
      const Baseline baseline = parse_baseline(tp_baseline, data.sample.landmark_count());
      std::vector<LandmarkConfiguration> registered;
      std::map<std::string, std::string> groups;
      if (tp_means) {
        for (const auto& tag : data.sample.group_tags()) {
          const std::string name = tag.empty() ? "mean" : tag;
          const auto mean = gpa_mean(data.sample.select_group(tag));
          registered.push_back(two_point_register(LandmarkConfiguration(name, mean.landmarks()), baseline));
          if (!tag.empty()) groups[name] = tag;
        }
      } else {
        for (const auto& config : data.sample.configurations()) {
          registered.push_back(two_point_register(config, baseline));
        }
        groups = data.sample.groups();
      }
      for (const auto& config : registered) {
        out << config.name();
        for (const auto& p : config.points()) out << "\t" << p.x << "\t" << p.y;
        out << "\n";
      }
      if (!tp_output.empty()) {
        Dataset result;
        result.sample = Sample(std::move(registered), std::move(groups), data.sample.metadata());
        result.provenance = data.provenance;
        write_output(tp_output, write_dataset(result), err);
      }
      if (!tp_outdir.empty()) {
        const GroupPair pair = select_group_means(data.sample, tp_targets);
        const auto a = two_point_register(pair.template_config, baseline);
        const auto b = two_point_register(pair.target, baseline);
        Scene scene = compose_grid({make_overlay_panel(pair.template_group + " vs " + pair.target_group,
                                                       a.points(), b.points(),
                                                       SegmentIndex{baseline.from, baseline.to})},
                                   1, kDefaultPanelSize);
        write_output(fs::path(tp_outdir) / ("twopoint_" + baseline_tag(baseline) + ".svg"),
                     render_scene(scene), err);
      }
      return kExitOk;
    }

    if (survey->parsed()) {
      const Dataset data = load_input(sv_input);
      const GroupPair pair = select_group_means(data.sample, sv_targets);
      const Scene scene = build_survey_scene(pair);
      for (const auto& s : enumerate_segments(pair.template_config.size())) {
        out << (s.i + 1) << "," << (s.j + 1) << "\t" << pair.template_config[s.i].label << "-"
            << pair.template_config[s.j].label << "\n";
      }
      out << "# " << scene.panels.size() << " baselines\n";
      write_output(fs::path(sv_outdir) / "survey_all.svg", render_scene(scene), err);
      return kExitOk;
    }

    if (rotations->parsed()) {
      const Dataset data = load_input(rot_input);
      const RotationAnalysis analysis = run_rotations(data.sample, rot_options);
      out << format_rotation_table(analysis, rot_options);
      if (!rot_outdir.empty()) {
        const std::string name = rot_options.nonaffine ? "rotations_nonaffine.svg" : "rotations.svg";
        write_output(fs::path(rot_outdir) / name, render_scene(analysis.scene), err);
      }
      return kExitOk;
    }

    if (fit->parsed()) {
      const Dataset data = load_input(fit_input);
      fit_options.baseline = parse_baseline(fit_baseline, data.sample.landmark_count());
      fit_options.trim = fit_trim == "target" ? TrimMode::kTarget : TrimMode::kTemplate;
      for (const auto& e : fit_extend) fit_options.extensions.push_back(parse_extension(e));
      const FitResult result = run_fit(data.sample, fit_options);
      const std::string stem = "fit_" + baseline_tag(fit_options.baseline);
      const std::string report = fit_report_json(result, fit_options);
      write_output(fs::path(fit_outdir) / (stem + ".svg"), render_scene(result.scene), err);
      write_output(fs::path(fit_outdir) / (stem + ".json"), report, err);
      const auto residuals = trend_residual_report(result.trend);
      out << "degree " << result.trend.degree << " fit on baseline "
          << result.template_config[fit_options.baseline.from].label << "-"
          << result.template_config[fit_options.baseline.to].label << ": df " << residuals.residual_df
          << " per coordinate, RSS " << residuals.rss[0] + residuals.rss[1] << ", condition number "
          << result.trend.condition_number << "\n";
      for (const auto& r : residuals.landmarks) out << r.label << "\t" << r.magnitude << "\n";
      return kExitOk;
    }

    if (demo->parsed()) {
      const fs::path dir(demo_outdir);
      if (demo_kind == "synthetic-vilmann") {
        const SyntheticVilmann synth = make_synthetic_vilmann();
        write_output(dir / "synthetic-vilmann.json", write_dataset(synth.dataset), err);
        const GroupPair pair = select_group_means(synth.dataset.sample);
        Scene scene = build_survey_scene(pair);
        write_output(dir / "demo_synthetic-vilmann.svg", render_scene(scene), err);
        out << "planted baseline " << synth.baseline.from + 1 << "," << synth.baseline.to + 1
            << "; perturbed landmark " << vilmann_labels()[synth.perturbed_landmark] << "\n";
        return kExitOk;
      }
      const PrototypeKind kind = parse_prototype_kind(demo_kind);
      const auto [tmpl, target] = prototype_pair(kind);
      Dataset data;
      data.sample = Sample({tmpl, target}, {{tmpl.name(), "template"}, {target.name(), "target"}});
      data.provenance.sources = {"demo:" + demo_kind};
      write_output(dir / ("demo_" + demo_kind + ".json"), write_dataset(data), err);
      write_output(dir / ("demo_" + demo_kind + ".svg"), render_scene(build_prototype_scene(kind)), err);
      return kExitOk;
    }
  } catch (const MorphoError& e) {
    err << "error (" << error_code_name(e.code()) << "): " << e.what() << "\n";
    return is_input_error(e.code()) ? kExitInputError : kExitNumericalError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace morphogrid::cli
