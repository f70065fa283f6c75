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

// Acceptance suite: one PASS/FAIL line per criterion, each held to its
// numeric tolerance and runtime budget. Exits non-zero if any criterion
// fails. Pass a substring to run a subset.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "httplib.h"
#include "json.hpp"
#include "paddy/augment/manifest.hpp"
#include "paddy/augment/transform.hpp"
#include "paddy/broker/broker.hpp"
#include "paddy/cli/dataset.hpp"
#include "paddy/core/digest.hpp"
#include "paddy/core/error.hpp"
#include "paddy/core/image_codec.hpp"
#include "paddy/core/taxonomy.hpp"
#include "paddy/gateway/records.hpp"
#include "paddy/gateway/server.hpp"
#include "paddy/inference/fixture.hpp"
#include "paddy/inference/pipeline.hpp"
#include "paddy/metrics/classification.hpp"
#include "paddy/metrics/detection.hpp"
#include "paddy/metrics/report.hpp"
#include "paddy/orchestrator/master.hpp"
#include "support/oracles.hpp"
#include "support/platform.hpp"
#include "support/published_detection.hpp"
#include "support/scenes.hpp"
#include "support/test_dirs.hpp"

namespace paddy::acceptance {
namespace {

using namespace std::chrono_literals;
using nlohmann::json;
namespace fs = std::filesystem;

/// Collects failed expectations; keeps the first few messages.
class Check {
 public:
  void expect(bool ok, std::string const& what) {
    ++total_;
    if (ok) return;
    if (failures_.size() < 4) failures_.push_back(what);
    ++failed_;
  }
  void near(double got, double want, double tol, std::string const& what) {
    expect(std::abs(got - want) <= tol,
           fmt::format("{}: got {:.12g}, want {:.12g} ± {:g}", what, got, want, tol));
  }
  bool ok() const { return failed_ == 0; }
  std::size_t total() const { return total_; }
  std::string summary() const {
    std::string s = fmt::format("{} of {} checks failed", failed_, total_);
    for (auto const& f : failures_) s += "; " + f;
    return s;
  }

 private:
  std::vector<std::string> failures_;
  std::size_t failed_ = 0, total_ = 0;
};

struct Criterion {
  std::string name;
  std::chrono::milliseconds budget;
  std::function<std::string(Check&)> body;
};

std::string fmt1(double v) { return fmt::format("{:.1f}", v); }

// ------------------------------------------------------------ metrics

std::string detection_macro_row(Check& c) {
  std::vector<metrics::ReportRow> rows;
  for (auto const& r : test::kPublishedRows) {
    rows.push_back({r.slug, {r.box_precision, r.box_recall, r.map50}});
  }
  auto const report = metrics::make_report("published", {"box_precision", "box_recall", "map50"}, rows);
  auto const& all = report.all.values;
  c.near(all[0], test::kPublishedAll.box_precision, 0.05, "box precision");
  c.near(all[1], test::kPublishedAll.box_recall, 0.05, "box recall");
  c.near(all[2], test::kPublishedAll.map50, 0.05, "mAP50");
  // Independent mean as a cross-check of the aggregator.
  for (std::size_t k = 0; k < 3; ++k) {
    double sum = 0;
    for (auto const& r : rows) sum += r.values[k];
    c.near(all[k], sum / 12.0, 1e-12, "aggregator mean");
  }
  auto const text = metrics::render_text(report);
  for (auto const& v : {fmt1(test::kPublishedAll.box_precision), fmt1(test::kPublishedAll.box_recall),
                        fmt1(test::kPublishedAll.map50)}) {
    c.expect(text.find(v) != std::string::npos, "rendered all row shows " + v);
  }
  return fmt::format("all = {:.4f} / {:.4f} / {:.4f}", all[0], all[1], all[2]);
}

std::string map_oracle(Check& c) {
  std::mt19937_64 rng(500);
  double worst = 0;
  int evaluated = 0;
  for (int trial = 0; trial < 500; ++trial) {
    auto scenes = test::random_scenes(rng, 3);
    auto images = test::to_image_boxes(scenes);
    auto const expected = oracle::map50(scenes, 3);
    if (!expected) {
      bool rejected = false;
      try {
        metrics::evaluate_detections(images, 3);
      } catch (Error const& e) {
        rejected = e.code() == ErrorCode::kInvalidInput;
      }
      c.expect(rejected, fmt::format("scene {} without ground truth is rejected", trial));
      continue;
    }
    double const got = metrics::evaluate_detections(images, 3).map50;
    worst = std::max(worst, std::abs(got - *expected));
    c.near(got, *expected, 1e-9, fmt::format("scene {}", trial));
    ++evaluated;
  }
  return fmt::format("{} scenes with ground truth, max |Δ| = {:.2e}", evaluated, worst);
}

std::string cross_entropy_checks(Check& c) {
  std::vector<int> labels(40);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 13);
  double const uniform = metrics::cross_entropy(metrics::ProbMatrix::uniform(40, 13), labels);
  c.near(uniform, std::log(13.0), 1e-9, "uniform predictor");
  c.near(uniform, 2.5649493574615367, 1e-9, "uniform predictor literal");

  std::vector<std::vector<double>> eye(13, std::vector<double>(13, 0.0));
  std::vector<int> diag(13);
  for (int i = 0; i < 13; ++i) {
    eye[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    diag[static_cast<std::size_t>(i)] = i;
  }
  double const perfect = metrics::cross_entropy(metrics::ProbMatrix::from_rows(eye), diag);
  c.near(perfect, 0.0, 1e-9, "perfect predictor");

  std::vector<int> two{0, 1};
  double const hand = metrics::cross_entropy(metrics::ProbMatrix::from_rows({{0.8, 0.2}, {0.4, 0.6}}), two);
  c.near(hand, 0.3669845875401002, 1e-9, "two-instance case");
  return fmt::format("uniform {:.12f}, perfect {:g}, two-instance {:.12f}", uniform, perfect, hand);
}

std::string binary_checks(Check& c) {
  auto const m = metrics::binary_metrics({8, 6, 2, 4});
  c.near(m.accuracy, 0.70, 1e-5, "accuracy");
  c.near(m.precision, 0.80, 1e-5, "precision");
  c.near(m.recall, 0.66667, 1e-5, "recall");
  c.near(m.f1, 0.72727, 1e-5, "f1");

  // The same population as labelled instances, shuffled 100 times.
  std::vector<std::pair<int, int>> inst;  // (truth, predicted), class 1 positive
  for (int i = 0; i < 8; ++i) inst.emplace_back(1, 1);
  for (int i = 0; i < 6; ++i) inst.emplace_back(0, 0);
  for (int i = 0; i < 2; ++i) inst.emplace_back(0, 1);
  for (int i = 0; i < 4; ++i) inst.emplace_back(1, 0);
  std::mt19937_64 rng(100);
  std::optional<metrics::EvalReport> first;
  for (int trial = 0; trial < 100; ++trial) {
    std::shuffle(inst.begin(), inst.end(), rng);
    std::vector<int> truth, pred;
    for (auto [t, p] : inst) {
      truth.push_back(t);
      pred.push_back(p);
    }
    auto const cm = metrics::confusion(pred, truth, 2);
    auto const s = metrics::classification_scores(cm);
    c.near(s.accuracy, 0.70, 1e-12, "shuffled accuracy");
    c.near(s.per_class[1].precision, 0.80, 1e-12, "shuffled precision");
    c.near(s.per_class[1].recall, 8.0 / 12.0, 1e-12, "shuffled recall");
    c.near(s.per_class[1].f1, 16.0 / 22.0, 1e-12, "shuffled f1");
    auto const report = metrics::classification_report(cm);
    if (!first) first = report;
    c.expect(report == *first, "report independent of instance order");
  }
  return fmt::format("{:.5f} / {:.5f} / {:.5f} / {:.5f}; 100 shuffles", m.accuracy, m.precision,
                     m.recall, m.f1);
}

// ------------------------------------------------------------ augmentation

augment::LabeledBox grid_box(std::mt19937_64& rng) {
  auto axis = [&](double& ctr, double& ext) {
    std::int64_t const e = 1000 + static_cast<std::int64_t>(rng() % 600000);
    std::int64_t const lo = e / 2 + e % 2;
    std::int64_t const m = lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(1000000 - 2 * lo + 1));
    ctr = static_cast<double>(m) / 1e6;
    ext = static_cast<double>(e) / 1e6;
  };
  augment::LabeledBox b;
  b.class_index = static_cast<int>(rng() % kNumDetectionClasses);
  axis(b.box.cx, b.box.w);
  axis(b.box.cy, b.box.h);
  return b;
}

RasterImage noise(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RasterImage img(w, h);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(rng() & 0xff);
  return img;
}

std::string augmentation_suite(Check& c) {
  augment::AugmentConfig cfg;
  cfg.rotation_deg = {-180, 180};
  cfg.shear_x_deg = {-45, 45};
  cfg.seed = 1000;
  std::mt19937_64 rng(1000);
  std::size_t kept = 0, dropped = 0;
  double const thresholds[] = {0.05, 0.3, 0.5, 0.8, 1.0};
  for (std::uint64_t i = 0; i < 1000; ++i) {
    auto const t = augment::random_transform(cfg, i);
    int const w = 40 + static_cast<int>(rng() % 400), h = 40 + static_cast<int>(rng() % 400);
    std::vector<augment::LabeledBox> boxes;
    for (int k = 0; k < 4; ++k) boxes.push_back(grid_box(rng));

    auto const out = augment::transform_boxes(boxes, t, w, h, 0.30);
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      auto const cb = boxes[k].box.corners();
      double const vis = oracle::box_visibility({cb.x1 * w, cb.y1 * h, cb.x2 * w, cb.y2 * h}, w, h,
                                                t.rotation_deg, t.shear_x_deg, t.hflip, t.vflip);
      if (out[k].kept) {
        ++kept;
        c.expect(vis >= 0.30 - 1e-9, fmt::format("transform {} keeps a box at visibility {:.6f}", i, vis));
        c.expect(out[k].box.box.valid(), "kept box is valid");
      } else {
        ++dropped;
        c.expect(vis < 0.30 + 1e-9, fmt::format("transform {} drops a box at visibility {:.6f}", i, vis));
      }
    }

    // Raising the threshold only ever removes boxes.
    std::vector<bool> previous(boxes.size(), true);
    for (double mv : thresholds) {
      auto const o = augment::transform_boxes(boxes, t, w, h, mv);
      for (std::size_t k = 0; k < boxes.size(); ++k) {
        c.expect(previous[k] || !o[k].kept, fmt::format("transform {} box {} reappears at {}", i, k, mv));
        previous[k] = o[k].kept;
      }
    }

    augment::TransformSpec flip;
    flip.hflip = true;
    augment::AnnotatedImage in{noise(8 + static_cast<int>(i % 24), 8 + static_cast<int>(i % 17), i), boxes};
    auto const twice = augment::apply_transform(augment::apply_transform(in, flip, 0.3), flip, 0.3);
    c.expect(twice.image == in.image && twice.boxes == in.boxes,
             fmt::format("double horizontal flip {} is exact", i));
  }
  c.expect(kept > 0 && dropped > 0, "both outcomes occur");

  // Leakage: test rows point at files that do not exist, so reading one
  // would fail the run.
  test::TempDir dir;
  fs::create_directories(dir.path() / "img");
  std::string csv = "id,path,split\n";
  for (int i = 0; i < 12; ++i) {
    write_file_atomic(dir.path() / fmt::format("img/tr{}.png", i), test::leaf_png(static_cast<unsigned>(i), 24, 20));
    csv += fmt::format("tr{},img/tr{}.png,train\n", i, i);
  }
  for (int i = 0; i < 6; ++i) csv += fmt::format("te{},absent/te{}.png,test\n", i, i);
  write_file_atomic(dir.path() / "manifest.csv", csv);
  augment::AugmentConfig leak_cfg;
  leak_cfg.seed = 3;
  auto const summary = cli::augment_manifest(dir.path() / "manifest.csv", leak_cfg, 4, dir.path() / "out");
  auto const m = augment::DatasetManifest::load(summary.manifest);
  std::set<std::string> test_ids, derived_sources;
  for (auto const& r : m.rows) {
    if (r.split == "test") test_ids.insert(r.id);
    if (!r.source_id.empty()) derived_sources.insert(r.source_id);
  }
  c.expect(summary.generated == 48, "48 variants from 12 train items");
  c.expect(test_ids.size() == 6, "test rows carried over");
  for (auto const& s : derived_sources) c.expect(!test_ids.contains(s), "variant derived from test item " + s);
  for (auto const& r : m.rows) {
    if (!r.source_id.empty()) c.expect(r.split == "train", "variant " + r.id + " is in train");
  }
  return fmt::format("1000 transforms, {} boxes kept, {} dropped; {} variants, none from test", kept,
                     dropped, summary.generated);
}

// ------------------------------------------------------------ nms / iou

std::string nms_iou_suite(Check& c) {
  std::mt19937_64 rng(200);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double const third = metrics::iou({0, 0, 10, 10}, {5, 0, 15, 10});
  double const raster = oracle::raster_iou({0, 0, 10, 10}, {5, 0, 15, 10}, 0.05);
  c.near(third, 1.0 / 3.0, 1e-3, "half-overlap IoU");
  c.near(third, raster, 1e-3, "half-overlap IoU vs raster");
  for (int i = 0; i < 300; ++i) {
    auto rect = [&] {
      double const x = u(rng), y = u(rng);
      return CornerBox{x, y, x + 0.05 + u(rng), y + 0.05 + u(rng)};
    };
    auto const a = rect(), b = rect();
    c.expect(metrics::iou(a, b) == metrics::iou(b, a), "IoU symmetry");
    c.near(metrics::iou(a, b), oracle::exact_iou({a.x1, a.y1, a.x2, a.y2}, {b.x1, b.y1, b.x2, b.y2}), 1e-12,
           "IoU vs exact overlap");
  }

  auto rect_of = [](NormalizedBox const& b) {
    auto const k = b.corners();
    return oracle::Rect{k.x1, k.y1, k.x2, k.y2};
  };
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t const n = 1 + rng() % 6;
    std::vector<inference::Detection> dets;
    std::vector<oracle::Pred> preds;
    std::set<double> confs;
    while (dets.size() < n) {
      double const w = 0.1 + 0.4 * u(rng), h = 0.1 + 0.4 * u(rng);
      NormalizedBox box{w / 2 + (1 - w) * u(rng) * 0.5, h / 2 + (1 - h) * u(rng) * 0.5, w, h};
      double const conf = u(rng);
      if (!confs.insert(conf).second) continue;
      int const cls = static_cast<int>(rng() % 2);
      inference::Detection d;
      d.class_index = cls;
      d.confidence = conf;
      d.box = box;
      dets.push_back(d);
      preds.push_back({cls, conf, rect_of(box)});
    }
    auto const fixed = oracle::nms_fixed_points(preds, 0.45);
    auto const out = inference::nms(dets, 0.45);
    std::set<double> got, want;
    for (auto const& d : out) got.insert(d.confidence);
    if (fixed.size() == 1) {
      for (auto i : fixed[0]) want.insert(preds[i].conf);
    }
    c.expect(fixed.size() == 1 && got == want, fmt::format("set {} matches exhaustive suppression", trial));
    c.expect(inference::nms(out, 0.45) == out, fmt::format("set {} is idempotent", trial));
  }
  return fmt::format("half-overlap IoU {:.6f} (raster {:.6f}); 200 suppression sets", third, raster);
}

// ------------------------------------------------------------ broker

std::string broker_suite(Check& c) {
  std::mt19937_64 rng(50);
  std::uint64_t dead_total = 0, redeliveries = 0, quiescent_points = 0;
  for (int schedule = 0; schedule < 50; ++schedule) {
    auto clock = std::make_shared<ManualClock>();
    broker::Broker b(broker::BrokerConfig{}, clock);
    b.declare_queue("jobs");
    struct Held {
      broker::Lease lease;
      std::uint64_t id;
    };
    std::vector<Held> held;
    std::map<std::uint64_t, int> last_count;
    std::set<std::uint64_t> acked;
    int published = 0;
    auto balanced = [&] {
      auto const s = b.stats("jobs");
      ++quiescent_points;
      return s.published == s.acked + s.ready + s.leased + s.dead_lettered &&
             s.published == static_cast<std::uint64_t>(published);
    };
    auto take = [&](broker::Delivery const& d) {
      auto const id = d.envelope.message_id;
      int const prev = last_count.contains(id) ? last_count[id] : 0;
      c.expect(d.envelope.delivery_count == prev + 1,
               fmt::format("message {} delivered with count {} after {}", id, d.envelope.delivery_count, prev));
      if (prev > 0) ++redeliveries;
      last_count[id] = d.envelope.delivery_count;
    };
    for (int step = 0; step < 300; ++step) {
      switch (rng() % 7) {
        case 0:
        case 1:
          b.publish("jobs", std::to_string(published++));
          break;
        case 2:
          if (auto d = b.consume("jobs", fmt::format("c{}", rng() % 3), 5s)) {
            take(*d);
            held.push_back({d->lease, d->envelope.message_id});
          }
          break;
        case 3:
          if (!held.empty()) {
            auto const h = held.back();
            held.pop_back();
            try {
              b.ack(h.lease);
              acked.insert(h.id);
            } catch (Error const& e) {
              c.expect(e.code() == ErrorCode::kLeaseInvalid, "stale ack reports LeaseInvalid");
            }
          }
          break;
        case 4:
          if (!held.empty()) {
            auto const h = held.front();
            held.erase(held.begin());
            try {
              b.nack(h.lease, true);
            } catch (Error const& e) {
              c.expect(e.code() == ErrorCode::kLeaseInvalid, "stale nack reports LeaseInvalid");
            }
          }
          break;
        case 5:
          held.clear();  // consumer crash
          break;
        case 6:
          clock->advance(std::chrono::seconds(rng() % 4));
          break;
      }
      c.expect(balanced(), fmt::format("schedule {} step {} balances", schedule, step));
    }
    // Let every lease lapse, then drain: ack what is still live.
    held.clear();
    clock->advance(10s);
    while (auto d = b.consume("jobs", "drain", 5s)) {
      take(*d);
      b.ack(d->lease);
      acked.insert(d->envelope.message_id);
    }
    c.expect(balanced(), fmt::format("schedule {} balances after drain", schedule));
    auto const s = b.stats("jobs");
    c.expect(s.ready == 0 && s.leased == 0, "queue drained");
    std::set<std::uint64_t> dead;
    std::vector<broker::Lease> audit;
    while (auto d = b.consume("jobs.dead", "audit")) {
      dead.insert(d->envelope.message_id);
      audit.push_back(d->lease);
    }
    for (auto const& l : audit) b.nack(l, true);
    c.expect(dead.size() == s.dead_lettered, "dead-letter queue holds every dead message");
    c.expect(acked.size() + dead.size() == static_cast<std::size_t>(published),
             fmt::format("schedule {}: every message acked or dead", schedule));
    dead_total += dead.size();
    for (auto const& [id, count] : last_count) {
      if (!acked.contains(id)) {
        c.expect(count == 5, fmt::format("message {} dead after {} deliveries", id, count));
      }
    }
  }

  // The fifth failure, not the fourth, dead-letters.
  auto clock = std::make_shared<ManualClock>();
  broker::Broker b(broker::BrokerConfig{}, clock);
  b.declare_queue("jobs");
  b.publish("jobs", "poison");
  for (int i = 1; i <= 5; ++i) {
    auto d = b.consume("jobs", "c", 1s);
    c.expect(d && d->envelope.delivery_count == i, fmt::format("delivery {}", i));
    c.expect(b.stats("jobs").dead_lettered == 0, "not dead before the fifth failure");
    if (!d) break;
    if (i % 2) {
      b.nack(d->lease, true);
    } else {
      clock->advance(2s);
    }
  }
  c.expect(!b.consume("jobs", "c") && b.stats("jobs").dead_lettered == 1, "fifth failure dead-letters");
  return fmt::format("50 schedules, {} quiescent points, {} redeliveries, {} dead-lettered",
                     quiescent_points, redeliveries, dead_total);
}

// ------------------------------------------------------------ end to end

/// Counts final results published by workers, per job.
class CountingBroker final : public broker::MessageBroker {
 public:
  explicit CountingBroker(std::shared_ptr<broker::MessageBroker> inner) : inner_(std::move(inner)) {}

  void declare_queue(std::string const& name, bool durable) override { inner_->declare_queue(name, durable); }
  std::uint64_t publish(std::string const& queue, std::string payload) override {
    if (queue == orchestrator::kResultsQueue) {
      auto const r = orchestrator::ResultMessage::parse(payload);
      if (!r.progress) {
        std::lock_guard lock(mu_);
        ++results_[r.job_id];
      }
    }
    return inner_->publish(queue, std::move(payload));
  }
  std::optional<broker::Delivery> consume(std::string const& queue, std::string const& consumer,
                                          std::optional<Duration> lease) override {
    return inner_->consume(queue, consumer, lease);
  }
  std::optional<broker::Delivery> consume_wait(std::string const& queue, std::string const& consumer,
                                               Duration timeout, std::optional<Duration> lease) override {
    return inner_->consume_wait(queue, consumer, timeout, lease);
  }
  void ack(broker::Lease const& lease) override { inner_->ack(lease); }
  void nack(broker::Lease const& lease, bool requeue) override { inner_->nack(lease, requeue); }
  broker::QueueStats stats(std::string const& queue) override { return inner_->stats(queue); }
  bool healthy() override { return inner_->healthy(); }

  std::map<std::string, int> results() const {
    std::lock_guard lock(mu_);
    return results_;
  }

 private:
  std::shared_ptr<broker::MessageBroker> inner_;
  mutable std::mutex mu_;
  std::map<std::string, int> results_;
};

json body_of(httplib::Result const& r) { return r ? json::parse(r->body) : json(); }

std::string end_to_end(Check& c) {
  test::TempDir dir;
  gateway::ServerConfig cfg;
  cfg.host = "127.0.0.1";
  cfg.port = 0;
  cfg.data_dir = dir.path();
  cfg.pbkdf2_iterations = 1000;
  gateway::GatewayServer server(cfg);
  server.start();

  constexpr int kJobs = 20;
  std::vector<std::string> const palette{"blast", "tungro", "hispa", "brown_spot", "leaf_roller",
                                         "bacterial_leaf_blight", "downy_mildew"};
  auto store = std::make_shared<inference::FixtureStore>();
  std::vector<std::string> images;
  std::vector<std::vector<std::string>> expected_slugs;
  for (int i = 0; i < kJobs; ++i) {
    auto png = test::leaf_png(9000 + static_cast<unsigned>(i));
    auto const digest = sha256_hex(png);
    std::vector<inference::Detection> dets;
    std::set<int> classes;
    for (int k = 0; k <= i % 3; ++k) {
      auto const& slug = palette[static_cast<std::size_t>((i + 2 * k) % palette.size())];
      dets.push_back(test::make_detection(slug, 0.9 - 0.1 * k, {0.2 + 0.3 * k, 0.5, 0.2, 0.2}));
      classes.insert(class_index(slug));
    }
    store->set_detections(digest, dets);
    store->set_classification(digest, inference::ClassificationResult::from_probs(
                                          test::one_hot_ish(detection_to_class_index(dets[0].class_index))));
    std::vector<std::string> slugs;
    for (int cls : classes) slugs.emplace_back(index_to_slug(cls));
    expected_slugs.push_back(slugs);
    images.push_back(std::move(png));
  }
  auto backend = [&](std::string id) {
    inference::BackendSpec spec;
    spec.backend_id = std::move(id);
    spec.fixtures = store;
    spec.latency = 120ms;
    spec.input_side = 64;
    return inference::backend_factory(spec);
  };
  orchestrator::MasterConfig mc;
  mc.backends["fixture-a"] = backend("fixture-a");
  mc.backends["fixture-b"] = backend("fixture-b");
  mc.pools[orchestrator::TaskKind::kDetection] = {2, "fixture-a", "fixture-a"};
  mc.worker.heartbeat_interval = 50ms;
  mc.worker.poll = 20ms;
  mc.worker.job_lease = 3s;
  auto counting = std::make_shared<CountingBroker>(server.broker());
  auto blobs = server.blobs();
  auto master = orchestrator::Master::start(mc, counting, [blobs](std::string const& d) { return blobs->get(d); });

  httplib::Client http("127.0.0.1", server.port());
  std::vector<httplib::Headers> auth;
  for (std::string const name : {"farmer_one", "farmer_two"}) {
    auto const creds = json{{"username", name}, {"password", "paddy-field-" + name}}.dump();
    c.expect(http.Post("/auth/register", creds, "application/json")->status == 201, "register " + name);
    auto const token = body_of(http.Post("/auth/login", creds, "application/json"))["token"].get<std::string>();
    auth.push_back({{"Authorization", "Bearer " + token}});
  }
  std::vector<std::string> uploads;
  for (int i = 0; i < kJobs; ++i) {
    httplib::MultipartFormDataItems form{{"file", images[static_cast<std::size_t>(i)], "leaf.png", "image/png"},
                                         {"lat", fmt::format("{}", 27 + 0.01 * i), "", ""},
                                         {"lon", "85.3", "", ""}};
    auto up = http.Post("/images", auth[static_cast<std::size_t>(i % 2)], form);
    c.expect(up && up->status == 201, fmt::format("upload {}", i));
    uploads.push_back(up && up->status == 201 ? body_of(up)["upload_id"].get<std::string>() : "");
  }

  std::atomic<int> done{0};
  std::vector<std::string> job_ids(kJobs);
  std::vector<std::vector<std::string>> trails(kJobs);
  std::vector<json> results(kJobs);
  std::vector<std::string> client_errors(kJobs);
  auto describe = [](httplib::Result const& r) {
    return r ? fmt::format("HTTP {} {}", r->status, r->body) : "transport error " + httplib::to_string(r.error());
  };
  std::vector<std::thread> clients;
  for (int i = 0; i < kJobs; ++i) {
    clients.emplace_back([&, i] {
      auto const idx = static_cast<std::size_t>(i);
      httplib::Client cl("127.0.0.1", server.port());
      auto const& h = auth[idx % 2];
      auto job = cl.Post("/jobs", h,
                         json{{"upload_id", uploads[idx]}, {"task_kind", "detection"}, {"verify", i % 2 == 0}}.dump(),
                         "application/json");
      if (!job || job->status != 202) {
        client_errors[idx] = "create: " + describe(job);
        return;
      }
      job_ids[idx] = body_of(job)["job_id"].get<std::string>();
      trails[idx].push_back(body_of(job)["status"].get<std::string>());
      auto const deadline = std::chrono::steady_clock::now() + 45s;
      while (std::chrono::steady_clock::now() < deadline) {
        auto s = cl.Get("/jobs/" + job_ids[idx], h);
        if (!s || s->status != 200) {
          client_errors[idx] = "poll: " + describe(s);
          break;
        }
        auto const st = body_of(s)["status"].get<std::string>();
        if (trails[idx].back() != st) trails[idx].push_back(st);
        if (st == "done" || st == "failed") break;
        std::this_thread::sleep_for(25ms);
      }
      if (trails[idx].back() == "done") {
        auto r = cl.Get("/jobs/" + job_ids[idx] + "/result", h);
        if (r && r->status == 200) {
          results[idx] = body_of(r);
        } else {
          client_errors[idx] = "result: " + describe(r);
        }
        ++done;
      }
    });
  }

  // Mid-run disruption: kill a busy worker, then swap the backend.
  std::string victim;
  auto const wait_until = std::chrono::steady_clock::now() + 20s;
  while (victim.empty() && std::chrono::steady_clock::now() < wait_until) {
    for (auto const& s : master->workers()) {
      if (s.state == orchestrator::WorkerState::kBusy) victim = s.worker_id;
    }
    if (victim.empty()) std::this_thread::sleep_for(5ms);
  }
  bool const killed = !victim.empty() && master->kill_worker(victim);
  c.expect(killed, "a busy worker was killed");
  std::this_thread::sleep_for(200ms);
  master->hot_swap(orchestrator::TaskKind::kDetection, "fixture-b");
  c.expect(master->pool_backend(orchestrator::TaskKind::kDetection) == "fixture-b", "hot swap took effect");

  for (auto& t : clients) t.join();
  for (int i = 0; i < kJobs; ++i) {
    auto const& e = client_errors[static_cast<std::size_t>(i)];
    c.expect(e.empty(), fmt::format("job {} client: {}", i, e));
  }
  c.expect(done == kJobs, fmt::format("{} of {} jobs done", done.load(), kJobs));

  std::map<std::string, int> rank{{"queued", 0}, {"processing", 1}, {"done", 2}, {"failed", 2}};
  auto const published = counting->results();
  std::set<std::string> backends;
  for (int i = 0; i < kJobs; ++i) {
    auto const idx = static_cast<std::size_t>(i);
    auto const& trail = trails[idx];
    c.expect(!trail.empty() && trail.back() == "done", fmt::format("job {} finished done", i));
    for (std::size_t k = 1; k < trail.size(); ++k) {
      c.expect(rank[trail[k - 1]] < rank[trail[k]], fmt::format("job {} status {} -> {}", i, trail[k - 1], trail[k]));
    }
    auto const it = published.find(job_ids[idx]);
    c.expect(it != published.end() && it->second == 1,
             fmt::format("job {} has {} results", i, it == published.end() ? 0 : it->second));
    auto const& r = results[idx];
    if (r.is_null()) continue;
    backends.insert(r["backend_id"].get<std::string>());
    c.expect(r["detections"].size() == static_cast<std::size_t>(i % 3 + 1), fmt::format("job {} detections", i));
    std::vector<std::string> slugs;
    for (auto const& t : r["treatments"]) {
      slugs.push_back(t["class"].get<std::string>());
      c.expect(!t["actions"].empty(), "disease treatment lists actions");
    }
    c.expect(slugs == expected_slugs[idx], fmt::format("job {} treatment join", i));
    for (auto const& d : r["detections"]) {
      auto const status = d["status"].get<std::string>();
      c.expect(i % 2 == 0 ? status == "verified" || status == "contested" : status == "kept",
               fmt::format("job {} detection status {}", i, status));
    }
  }
  auto const dismissed = master->dismissed_count();
  master->stop();
  server.stop();
  return fmt::format("{} jobs done, killed {}, dismissed {}, backends seen {}", done.load(), victim, dismissed,
                     fmt::join(backends, "+"));
}

// ------------------------------------------------------------ verification

std::string verification_suite(Check& c) {
  std::mt19937_64 rng(92);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto store = std::make_shared<inference::FixtureStore>();
  inference::BackendSpec spec;
  spec.fixtures = store;
  spec.detect = false;
  spec.input_side = 48;
  auto classifier = inference::make_backend(spec);
  inference::VerifyOptions const opts;
  std::size_t verified = 0, contested = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto const image = inference::ImageInput::from_bytes(test::leaf_png(300 + static_cast<unsigned>(trial), 96, 80));
    std::vector<inference::Detection> dets;
    std::size_t const n = 1 + rng() % 5;
    for (std::size_t k = 0; k < n; ++k) {
      inference::Detection d;
      d.class_index = static_cast<int>(rng() % kNumDetectionClasses);
      d.confidence = 0.3 + 0.6 * u(rng);
      d.box = {0.15 + 0.7 * u(rng), 0.15 + 0.7 * u(rng), 0.1 + 0.2 * u(rng), 0.1 + 0.2 * u(rng)};
      d.status = inference::DetectionStatus::kKept;
      dets.push_back(d);
    }
    // Per crop, a classifier output that agrees by arg-max, agrees by
    // probability only, or disagrees.
    std::map<std::string, std::vector<double>> by_crop;
    for (auto const& d : dets) {
      auto const crop = inference::verification_crop(image, d, opts.crop_margin, spec.input_side);
      int const own = detection_to_class_index(d.class_index);
      int const other = (own + 1 + static_cast<int>(rng() % 12)) % kNumClasses;
      std::vector<double> p(kNumClasses, 0.0);
      switch (rng() % 3) {
        case 0: p = test::one_hot_ish(own, 0.7); break;
        case 1:
          p.assign(kNumClasses, 0.15 / (kNumClasses - 2));
          p[static_cast<std::size_t>(other)] = 0.5;
          p[static_cast<std::size_t>(own)] = 0.35;
          break;
        default:
          p.assign(kNumClasses, 0.25 / (kNumClasses - 2));
          p[static_cast<std::size_t>(other)] = 0.7;
          p[static_cast<std::size_t>(own)] = 0.05;
          break;
      }
      store->set_classification(crop.digest, inference::ClassificationResult::from_probs(p));
      by_crop[crop.digest] = p;
    }
    auto const out = inference::verify_detections(image, dets, *classifier, opts);
    c.expect(out.size() == dets.size(), "verification never removes detections");
    for (std::size_t k = 0; k < std::min(out.size(), dets.size()); ++k) {
      auto const crop = inference::verification_crop(image, dets[k], opts.crop_margin, spec.input_side);
      auto const& p = by_crop.at(crop.digest);
      int const own = detection_to_class_index(dets[k].class_index);
      auto const top = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
      bool const agrees = top == own || p[static_cast<std::size_t>(own)] >= opts.agree_prob;
      auto const want = agrees ? inference::DetectionStatus::kVerified : inference::DetectionStatus::kContested;
      c.expect(out[k].status == want, fmt::format("trial {} detection {} status", trial, k));
      c.expect(out[k].class_index == dets[k].class_index && out[k].confidence == dets[k].confidence &&
                   out[k].box == dets[k].box,
               "class, confidence and box unchanged");
      (agrees ? verified : contested) += 1;
    }
  }
  c.expect(verified > 0 && contested > 0, "both outcomes occur");
  return fmt::format("{} verified, {} contested", verified, contested);
}

std::vector<Criterion> criteria() {
  return {
      {"detection macro row from published per-class scores", 1000ms, detection_macro_row},
      {"mAP50 equals brute-force PR oracle on 500 scenes", 10000ms, map_oracle},
      {"cross-entropy reference values", 1000ms, cross_entropy_checks},
      {"binary metrics and order invariance", 1000ms, binary_checks},
      {"augmentation visibility, flips, monotonicity and leakage", 30000ms, augmentation_suite},
      {"IoU and NMS against oracles", 5000ms, nms_iou_suite},
      {"broker accounting under crash schedules", 20000ms, broker_suite},
      {"end to end with worker kill and hot swap", 60000ms, end_to_end},
      {"two-stage verification rule", 1000ms, verification_suite},
  };
}

}  // namespace
}  // namespace paddy::acceptance

int main(int argc, char** argv) {
  using namespace paddy::acceptance;
  std::string const filter = argc > 1 ? argv[1] : "";
  int failures = 0, ran = 0;
  for (auto const& cr : criteria()) {
    if (!filter.empty() && cr.name.find(filter) == std::string::npos) continue;
    ++ran;
    Check check;
    std::string detail;
    auto const start = std::chrono::steady_clock::now();
    try {
      detail = cr.body(check);
    } catch (std::exception const& e) {
      check.expect(false, fmt::format("threw: {}", e.what()));
    }
    auto const ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    bool const in_time = ms <= cr.budget;
    bool const pass = check.ok() && in_time;
    failures += pass ? 0 : 1;
    std::string line = fmt::format("{}  {}  [{} ms / {} ms]", pass ? "PASS" : "FAIL", cr.name, ms.count(),
                                   cr.budget.count());
    if (!detail.empty()) line += "  " + detail;
    if (!check.ok()) line += "  -- " + check.summary();
    if (!in_time) line += "  -- over budget";
    std::cout << line << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed", ran - failures, ran) << std::endl;
  return failures == 0 ? 0 : 1;
}
