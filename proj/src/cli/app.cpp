// Copyright 2026 The Paddy Diagnosis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "paddy/cli/app.hpp"

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdlib>
#include <memory>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "paddy/cli/dataset.hpp"
#include "paddy/cli/eval.hpp"
#include "paddy/cli/fixtures.hpp"
#include "paddy/cli/serve.hpp"
#include "paddy/core/error.hpp"
#include "paddy/core/image_codec.hpp"
#include "paddy/metrics/report.hpp"

namespace paddy::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

void install_signal_handlers() {
  g_stop = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
}

json load_json(fs::path const& path) {
  try {
    return json::parse(read_file(path));
  } catch (json::exception const& e) {
    fail(ErrorCode::kInvalidInput, fmt::format("{}: {}", path.string(), e.what()));
  }
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return 2;
    case ErrorCode::kRefused: return 3;
    default: return 1;
  }
}

std::pair<std::string, int> split_host_port(std::string const& s) {
  auto const colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    fail(ErrorCode::kInvalidInput, fmt::format("'{}' is not host:port", s));
  }
  int port = 0;
  try {
    port = std::stoi(s.substr(colon + 1));
  } catch (std::exception const&) {
    fail(ErrorCode::kInvalidInput, fmt::format("'{}' has no valid port", s));
  }
  return {s.substr(0, colon), port};
}

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  bool json = false;
};

}  // namespace

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Paddy disease diagnosis toolkit", "paddyctl"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for splitting and augmentation")->capture_default_str();
  app.add_option("--config", g.config, "JSON configuration for the chosen command");
  app.add_flag("--json", g.json, "Machine-readable output");

  // Each handler stores its work here; it runs after parsing succeeds.
  std::function<void()> action;
  auto emit = [&](json const& doc, std::string const& text) {
    out << (g.json ? doc.dump(2) + "\n" : text);
  };
  auto emit_report = [&](metrics::EvalReport const& r) {
    emit(metrics::to_json(r), metrics::render_text(r));
  };

  auto* dataset = app.add_subcommand("dataset", "Dataset preparation")->require_subcommand(1);

  std::string stats_dir;
  auto* stats = dataset->add_subcommand("stats", "Image counts per class directory");
  stats->add_option("dir", stats_dir, "Directory with one subdirectory per class")->required();
  stats->callback([&] {
    action = [&] {
      auto const s = dataset_stats(stats_dir);
      emit(to_json(s), render_text(s));
    };
  });

  std::string split_manifest_path, split_out;
  double ratio = 0.8;
  auto* split = dataset->add_subcommand("split", "Assign manifest rows to train and test");
  split->add_option("manifest", split_manifest_path, "Manifest CSV")->required();
  split->add_option("--ratio", ratio, "Train fraction")->capture_default_str();
  split->add_option("--out", split_out, "Output manifest (default: overwrite input)");
  split->callback([&] {
    action = [&] {
      auto const s = split_manifest(split_manifest_path, ratio, g.seed, split_out);
      emit(json{{"train", s.train}, {"test", s.test}, {"manifest", s.written.string()}},
           fmt::format("train {}  test {}  -> {}\n", s.train, s.test, s.written.string()));
    };
  });

  std::string aug_manifest, aug_out;
  int multiplier = 1;
  auto* aug = dataset->add_subcommand("augment", "Augment the train split");
  aug->add_option("manifest", aug_manifest, "Split manifest CSV")->required();
  aug->add_option("--out-dir", aug_out, "Directory for images and the new manifest")->required();
  aug->add_option("--multiplier", multiplier, "Variants per train item")->capture_default_str();
  aug->callback([&] {
    action = [&] {
      auto config = g.config.empty() ? augment::AugmentConfig{} : parse_augment_config(load_json(g.config));
      config.seed = g.seed;
      auto const s = augment_manifest(aug_manifest, config, multiplier, aug_out);
      emit(json{{"train_sources", s.train_sources},
                {"generated", s.generated},
                {"boxes_kept", s.boxes_kept},
                {"boxes_dropped", s.boxes_dropped},
                {"manifest", s.manifest.string()}},
           fmt::format("{} variants from {} train items ({} boxes kept, {} dropped) -> {}\n",
                       s.generated, s.train_sources, s.boxes_kept, s.boxes_dropped,
                       s.manifest.string()));
    };
  });

  auto* eval = app.add_subcommand("eval", "Offline evaluation")->require_subcommand(1);
  std::string cls_preds, cls_labels;
  auto* cls = eval->add_subcommand("classify", "Classification report");
  cls->add_option("predictions", cls_preds, "CSV id,prob_0..prob_12")->required();
  cls->add_option("labels", cls_labels, "CSV id,class")->required();
  cls->callback([&] { action = [&] { emit_report(eval_classify(cls_preds, cls_labels)); }; });

  std::string det_preds, det_truth;
  metrics::DetectionEvalOptions det_opts;
  auto* det = eval->add_subcommand("detect", "Detection report");
  det->add_option("predictions", det_preds, "Directory of per-image prediction files")->required();
  det->add_option("truth", det_truth, "Directory of per-image annotation files")->required();
  det->add_option("--iou", det_opts.iou_threshold, "IoU match threshold")->capture_default_str();
  det->add_option("--operating-confidence", det_opts.operating_confidence,
                  "Confidence at which box precision and recall are read")
      ->capture_default_str();
  det->callback([&] { action = [&] { emit_report(eval_detect(det_preds, det_truth, det_opts)); }; });

  auto* fixtures = app.add_subcommand("fixtures", "Fixture stores")->require_subcommand(1);
  std::string fx_images, fx_spec, fx_out;
  auto* make = fixtures->add_subcommand("make", "Build a fixture store from a spec");
  make->add_option("images", fx_images, "Image directory")->required();
  make->add_option("spec", fx_spec, "Spec JSON keyed by image file name")->required();
  make->add_option("--out", fx_out, "Store file to write")->required();
  make->callback([&] {
    action = [&] {
      auto const store = make_fixtures(fx_images, load_json(fx_spec));
      store.save(fx_out);
      emit(json{{"classification", store.classification_count()},
                {"detection", store.detection_count()},
                {"store", fx_out}},
           fmt::format("{} classification and {} detection fixtures -> {}\n",
                       store.classification_count(), store.detection_count(), fx_out));
    };
  });

  auto* serve = app.add_subcommand("serve", "Run services until interrupted")->require_subcommand(1);
  auto* serve_gw = serve->add_subcommand("gateway", "HTTP gateway, configured from PADDY_* variables");
  serve_gw->callback([&] {
    action = [&] {
      std::optional<orchestrator::MasterConfig> workers;
      if (!g.config.empty()) workers = parse_master_config(load_json(g.config), fs::path(g.config).parent_path());
      install_signal_handlers();
      serve_gateway(std::move(workers), g_stop);
    };
  });
  std::string gateway_addr, broker_key;
  auto* serve_wk = serve->add_subcommand("worker", "Worker tier for a remote gateway");
  serve_wk->add_option("--gateway", gateway_addr, "Gateway host:port")->required();
  serve_wk->add_option("--broker-key", broker_key, "Internal route key (default: PADDY_BROKER_KEY)");
  serve_wk->callback([&] {
    action = [&] {
      if (g.config.empty()) fail(ErrorCode::kInvalidInput, "serve worker needs --config");
      if (broker_key.empty()) {
        if (char const* k = std::getenv("PADDY_BROKER_KEY")) broker_key = k;
      }
      auto [host, port] = split_host_port(gateway_addr);
      install_signal_handlers();
      serve_worker(parse_master_config(load_json(g.config), fs::path(g.config).parent_path()), host,
                   port, broker_key, g_stop);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (CLI::ParseError const& e) {
    return app.exit(e, out, err);
  }
  try {
    if (action) action();
    return 0;
  } catch (Error const& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code(e.code());
  } catch (std::exception const& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace paddy::cli
