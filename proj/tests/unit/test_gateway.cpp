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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "paddy/broker/broker.hpp"
#include "paddy/broker/remote.hpp"
#include "paddy/core/digest.hpp"
#include "paddy/core/error.hpp"
#include "paddy/gateway/server.hpp"
#include "paddy/gateway/service.hpp"
#include "paddy/orchestrator/master.hpp"
#include "support/platform.hpp"
#include "support/test_dirs.hpp"

namespace paddy::gateway {
namespace {

using namespace std::chrono_literals;
using nlohmann::json;
using orchestrator::JobMessage;
using orchestrator::ResultMessage;
using orchestrator::TaskKind;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (Error const& e) {
    return e.code();
  }
  FAIL("expected paddy::Error");
  return ErrorCode::kIo;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (Error const& e) {
    return e.what();
  }
  return {};
}

struct Fixture {
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>();
  test::TempDir dir;
  std::shared_ptr<broker::Broker> broker = std::make_shared<broker::Broker>();
  std::shared_ptr<FileRepository> repo = std::make_shared<FileRepository>();
  std::shared_ptr<BlobStore> blobs = std::make_shared<BlobStore>(dir.path() / "blobs");
  std::unique_ptr<Gateway> gw;

  Fixture() {
    GatewayOptions o;
    o.pbkdf2_iterations = 1000;
    gw = std::make_unique<Gateway>(repo, blobs, broker, TreatmentKb::load_bundled(), o, clock);
  }

  std::string user(std::string const& name) {
    gw->register_user(name, "password-" + name);
    return gw->authenticate(gw->login(name, "password-" + name));
  }

  std::string upload(std::string const& uid, std::optional<GeoPoint> geo = std::nullopt,
                     std::uint64_t seed = 1) {
    return gw->upload_image(uid, test::leaf_png(seed), geo).upload_id;
  }

  JobRecord job(std::string const& uid, std::string const& upload_id,
                TaskKind kind = TaskKind::kDetection) {
    return gw->create_job(uid, {upload_id, kind, false, {}, {}});
  }

  ResultMessage detection_result(std::string const& job_id,
                                 std::vector<std::string> const& slugs) {
    ResultMessage m;
    m.job_id = job_id;
    m.backend_id = "fixture";
    m.worker_id = "w1";
    double x = 0.2;
    for (auto const& s : slugs) {
      m.detections.push_back(test::make_detection(s, 0.8, {x, 0.5, 0.1, 0.1}));
      x += 0.15;
    }
    return m;
  }
};

TEST_CASE("username and password rules") {
  CHECK(valid_username("abc"));
  CHECK(valid_username("farmer_01"));
  CHECK(valid_username(std::string(32, 'a')));
  CHECK_FALSE(valid_username("ab"));
  CHECK_FALSE(valid_username(std::string(33, 'a')));
  CHECK_FALSE(valid_username("Farmer"));
  CHECK_FALSE(valid_username("a-b-c"));
  CHECK(valid_password("12345678"));
  CHECK_FALSE(valid_password("1234567"));
}

TEST_CASE("password hashes are salted and verify in constant form") {
  auto const a = hash_password("correct horse", 1000);
  auto const b = hash_password("correct horse", 1000);
  CHECK(a != b);
  CHECK(a.rfind("pbkdf2-sha256$1000$", 0) == 0);
  CHECK(a.find("correct") == std::string::npos);
  CHECK(verify_password("correct horse", a));
  CHECK(verify_password("correct horse", b));
  CHECK_FALSE(verify_password("correct horsE", a));
  CHECK_FALSE(verify_password("correct horse", "plain"));
  CHECK_FALSE(verify_password("correct horse", "pbkdf2-sha256$x$00$00"));
  CHECK_FALSE(verify_password("correct horse", "md5$1000$00$00"));
  CHECK(new_token().size() == 64);
  CHECK(new_token() != new_token());
  CHECK(token_digest("t") == sha256_hex(std::string_view("t")));
}

TEST_CASE("register, login and authenticate") {
  Fixture f;
  auto const id = f.gw->register_user("alice", "wonderland");
  auto const token = f.gw->login("alice", "wonderland");
  CHECK(is_sha256_hex(token));
  CHECK(f.gw->authenticate(token) == id);
  CHECK_FALSE(f.repo->token(token).has_value());

  CHECK(code_of([&] { f.gw->register_user("alice", "other-password"); }) == ErrorCode::kConflict);
  CHECK(code_of([&] { f.gw->register_user("Al", "wonderland"); }) == ErrorCode::kInvalidInput);
  CHECK(code_of([&] { f.gw->register_user("bob", "short"); }) == ErrorCode::kInvalidInput);

  auto const wrong_pw = message_of([&] { f.gw->login("alice", "wonderlanD"); });
  auto const no_user = message_of([&] { f.gw->login("mallory", "wonderland"); });
  CHECK(wrong_pw == no_user);
  CHECK(code_of([&] { f.gw->login("alice", "nope-nope"); }) == ErrorCode::kUnauthorized);
  CHECK(code_of([&] { f.gw->authenticate("deadbeef"); }) == ErrorCode::kUnauthorized);
  CHECK(code_of([&] { f.gw->authenticate(""); }) == ErrorCode::kUnauthorized);

  f.clock->advance(23h + 59min);
  CHECK(f.gw->authenticate(token) == id);
  f.clock->advance(1min);
  CHECK(code_of([&] { f.gw->authenticate(token); }) == ErrorCode::kUnauthorized);
}

TEST_CASE("uploads are content addressed and validated") {
  Fixture f;
  auto const uid = f.user("alice");
  auto const png = test::leaf_png(5);
  auto const a = f.gw->upload_image(uid, png, GeoPoint{27.7, 85.3});
  auto const b = f.gw->upload_image(uid, png);
  CHECK(a.upload_id != b.upload_id);
  CHECK(a.image_digest == sha256_hex(png));
  CHECK(a.image_digest == b.image_digest);
  CHECK(f.blobs->blob_count() == 1);
  CHECK(f.repo->upload(a.upload_id)->geo == GeoPoint{27.7, 85.3});
  CHECK_FALSE(f.repo->upload(b.upload_id)->geo.has_value());

  auto const jpeg = encode_jpeg(decode_image(png));
  CHECK_NOTHROW(f.gw->upload_image(uid, jpeg));
  CHECK(f.blobs->blob_count() == 2);

  CHECK(code_of([&] { f.gw->upload_image(uid, "just some text"); }) == ErrorCode::kUnsupportedMedia);
  CHECK(code_of([&] { f.gw->upload_image(uid, png.substr(0, 40)); }) == ErrorCode::kUnsupportedMedia);
  std::string big = png;
  big.resize(kMaxUploadBytes + 1, '\0');
  CHECK(code_of([&] { f.gw->upload_image(uid, big); }) == ErrorCode::kPayloadTooLarge);
  CHECK(code_of([&] { f.gw->upload_image(uid, png, GeoPoint{91, 0}); }) == ErrorCode::kInvalidInput);
  CHECK(f.blobs->blob_count() == 2);
}

TEST_CASE("job creation publishes and enforces ownership") {
  Fixture f;
  auto const alice = f.user("alice");
  auto const bob = f.user("bob_2");
  auto const up = f.upload(alice);
  auto const job = f.gw->create_job(alice, {up, TaskKind::kDetection, true, 0.3, 0.5});
  CHECK(job.status == JobStatus::kQueued);
  CHECK(f.gw->job_status(alice, job.job_id).status == JobStatus::kQueued);

  auto d = f.broker->consume("jobs.detection", "t");
  REQUIRE(d);
  auto const msg = JobMessage::parse(d->envelope.payload);
  CHECK(msg.job_id == job.job_id);
  CHECK(msg.image_digest == f.repo->upload(up)->image_digest);
  CHECK(msg.verify);
  CHECK(msg.conf_threshold == 0.3);
  CHECK(msg.nms_iou == 0.5);

  CHECK(code_of([&] { f.job(bob, up); }) == ErrorCode::kForbidden);
  CHECK(code_of([&] { f.job(alice, "0123"); }) == ErrorCode::kNotFound);
  CHECK(code_of([&] { f.gw->job_status(bob, job.job_id); }) == ErrorCode::kForbidden);
  CHECK(code_of([&] { f.gw->get_result(bob, job.job_id); }) == ErrorCode::kForbidden);
  CHECK(code_of([&] { f.gw->job_status(alice, "ffff"); }) == ErrorCode::kNotFound);
  CHECK(code_of([&] { f.gw->create_job(alice, {up, TaskKind::kDetection, false, 1.5, {}}); }) ==
        ErrorCode::kInvalidInput);

  f.broker->shutdown();
  CHECK(code_of([&] { f.job(alice, up); }) == ErrorCode::kUnavailable);
}

TEST_CASE("results apply idempotently with monotone status") {
  Fixture f;
  auto const uid = f.user("alice");
  auto const job = f.job(uid, f.upload(uid));

  CHECK(code_of([&] { f.gw->get_result(uid, job.job_id); }) == ErrorCode::kConflict);
  CHECK(message_of([&] { f.gw->get_result(uid, job.job_id); }).find("queued") != std::string::npos);

  ResultMessage progress;
  progress.job_id = job.job_id;
  progress.progress = true;
  CHECK(f.gw->apply_result(progress));
  CHECK(f.gw->job_status(uid, job.job_id).status == JobStatus::kProcessing);
  CHECK_FALSE(f.gw->apply_result(progress));

  auto const result = f.detection_result(job.job_id, {"blast", "tungro", "blast"});
  CHECK(f.gw->apply_result(result));
  for (int i = 0; i < 5; ++i) CHECK_FALSE(f.gw->apply_result(result));
  CHECK_FALSE(f.gw->apply_result(progress));
  auto const done = f.gw->job_status(uid, job.job_id);
  CHECK(done.status == JobStatus::kDone);
  CHECK(done.result_ref == job.job_id);

  auto const r = f.gw->get_result(uid, job.job_id);
  CHECK(r.detections.size() == 3);
  REQUIRE(r.treatments.size() == 2);
  CHECK(r.treatments[0].slug == "blast");
  CHECK(r.treatments[1].slug == "tungro");
  CHECK_FALSE(r.treatments[0].entry.actions.empty());

  ResultMessage err = result;
  err.error = "late failure";
  CHECK_FALSE(f.gw->apply_result(err));
  CHECK(f.gw->job_status(uid, job.job_id).status == JobStatus::kDone);

  ResultMessage orphan = result;
  orphan.job_id = "abcdef";
  CHECK_FALSE(f.gw->apply_result(orphan));
}

TEST_CASE("failures, dead letters and classification shape") {
  Fixture f;
  auto const uid = f.user("alice");
  auto const up = f.upload(uid);

  auto const j1 = f.job(uid, up);
  ResultMessage err = f.detection_result(j1.job_id, {});
  err.error = "backend exploded";
  CHECK(f.gw->apply_result(err));
  auto const s1 = f.gw->job_status(uid, j1.job_id);
  CHECK(s1.status == JobStatus::kFailed);
  CHECK(s1.error == "backend exploded");
  CHECK_FALSE(s1.result_ref.has_value());
  CHECK_FALSE(f.gw->apply_result(f.detection_result(j1.job_id, {"blast"})));
  CHECK(message_of([&] { f.gw->get_result(uid, j1.job_id); }).find("failed") != std::string::npos);

  auto const j2 = f.job(uid, up);
  CHECK(f.gw->apply_dead_letter({j2.job_id, std::string(64, 'a'), TaskKind::kDetection, false, {}, {}}));
  CHECK(f.gw->job_status(uid, j2.job_id).status == JobStatus::kFailed);

  auto const j3 = f.job(uid, up, TaskKind::kClassification);
  CHECK(f.gw->apply_result(f.detection_result(j3.job_id, {"blast"})));
  CHECK(f.gw->job_status(uid, j3.job_id).status == JobStatus::kFailed);

  auto const j4 = f.job(uid, up, TaskKind::kClassification);
  ResultMessage healthy;
  healthy.job_id = j4.job_id;
  healthy.backend_id = "fixture";
  healthy.classification = inference::ClassificationResult::from_probs(test::one_hot_ish(kNormalIndex));
  CHECK(f.gw->apply_result(healthy));
  auto const r = f.gw->get_result(uid, j4.job_id);
  REQUIRE(r.treatments.size() == 1);
  CHECK(r.treatments[0].slug == "normal");
  CHECK(r.treatments[0].entry.actions.empty());
}

TEST_CASE("pump consumes results and dead letters") {
  Fixture f;
  auto const uid = f.user("alice");
  auto const up = f.upload(uid);
  auto const j1 = f.job(uid, up);
  auto const j2 = f.job(uid, up);
  f.broker->publish("results", f.detection_result(j1.job_id, {"hispa"}).serialize());
  f.broker->publish("results", f.detection_result(j1.job_id, {"hispa"}).serialize());
  f.broker->publish("results", "garbage");
  f.broker->publish("jobs.detection.dead",
                    JobMessage{j2.job_id, std::string(64, 'a'), TaskKind::kDetection, false, {}, {}}.serialize());
  CHECK(f.gw->pump(10ms) == 4);
  CHECK(f.gw->job_status(uid, j1.job_id).status == JobStatus::kDone);
  CHECK(f.gw->job_status(uid, j2.job_id).status == JobStatus::kFailed);
  CHECK(f.broker->stats("results").ready == 0);
  CHECK(f.gw->pump(1ms) == 0);
}

TEST_CASE("outbreak aggregation") {
  Fixture f;
  auto const uid = f.user("alice");
  std::vector<GeoPoint> const pts{{10, 20}, {12, 24}, {11, 29}};
  auto complete = [&](std::optional<GeoPoint> geo, std::vector<std::string> slugs) {
    auto const j = f.job(uid, f.upload(uid, geo));
    REQUIRE(f.gw->apply_result(f.detection_result(j.job_id, slugs)));
  };
  auto const t0 = f.clock->now();
  for (auto const& p : pts) complete(p, {"blast"});
  complete(std::nullopt, {"blast"});

  auto groups = f.gw->list_outbreaks({0, 0, 40, 40}, t0);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].class_index == class_index("blast"));
  CHECK(groups[0].count == 3);
  CHECK(groups[0].centroid.latitude == doctest::Approx(11.0).epsilon(1e-12));
  CHECK(groups[0].centroid.longitude == doctest::Approx(73.0 / 3).epsilon(1e-12));

  // Healthy classifications never produce reports.
  auto const jn = f.job(uid, f.upload(uid, GeoPoint{10, 20}), TaskKind::kClassification);
  ResultMessage healthy;
  healthy.job_id = jn.job_id;
  healthy.classification = inference::ClassificationResult::from_probs(test::one_hot_ish(kNormalIndex));
  REQUIRE(f.gw->apply_result(healthy));
  CHECK(f.gw->list_outbreaks({0, 0, 40, 40}, t0).size() == 1);

  // Closed rectangle: a report on the edge is inside.
  auto edge = f.gw->list_outbreaks({10, 20, 12, 24}, t0);
  REQUIRE(edge.size() == 1);
  CHECK(edge[0].count == 2);
  CHECK(f.gw->list_outbreaks({-5, -5, 5, 5}, t0).empty());

  f.clock->advance(1h);
  auto const t1 = f.clock->now();
  CHECK(f.gw->list_outbreaks({0, 0, 40, 40}, t1).empty());
  complete(GeoPoint{30, 30}, {"tungro", "blast"});
  groups = f.gw->list_outbreaks({0, 0, 40, 40}, t1);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].count == 1);
  CHECK(groups[1].class_index == class_index("tungro"));

  CHECK(code_of([&] { f.gw->list_outbreaks({40, 0, 0, 40}, t0); }) == ErrorCode::kInvalidInput);
  CHECK(code_of([&] { f.gw->list_outbreaks({0, 40, 40, 0}, t0); }) == ErrorCode::kInvalidInput);
  CHECK(code_of([&] { f.gw->list_outbreaks({-100, 0, 0, 40}, t0); }) == ErrorCode::kInvalidInput);
}

TEST_CASE("two interleaved users never see each other's data") {
  Fixture f;
  std::string const users[] = {f.user("alice"), f.user("bob_2")};
  std::map<std::string, std::string> upload_owner, job_owner;
  std::mt19937_64 rng(11);
  for (int step = 0; step < 300; ++step) {
    auto const& me = users[rng() % 2];
    switch (rng() % 4) {
      case 0:
        upload_owner[f.upload(me, GeoPoint{1, 1}, rng() % 3)] = me;
        break;
      case 1: {
        if (upload_owner.empty()) break;
        auto it = std::next(upload_owner.begin(), static_cast<long>(rng() % upload_owner.size()));
        if (it->second == me) {
          job_owner[f.job(me, it->first).job_id] = me;
        } else {
          CHECK(code_of([&] { f.job(me, it->first); }) == ErrorCode::kForbidden);
        }
        break;
      }
      case 2: {
        if (job_owner.empty()) break;
        auto it = std::next(job_owner.begin(), static_cast<long>(rng() % job_owner.size()));
        f.gw->apply_result(f.detection_result(it->first, {"hispa"}));
        break;
      }
      default: {
        if (job_owner.empty()) break;
        auto it = std::next(job_owner.begin(), static_cast<long>(rng() % job_owner.size()));
        if (it->second == me) {
          auto const s = f.gw->job_status(me, it->first);
          CHECK(s.owner == me);
          if (s.status == JobStatus::kDone) CHECK(f.gw->get_result(me, it->first).job_id == it->first);
        } else {
          CHECK(code_of([&] { f.gw->job_status(me, it->first); }) == ErrorCode::kForbidden);
          CHECK(code_of([&] { f.gw->get_result(me, it->first); }) == ErrorCode::kForbidden);
        }
      }
    }
  }
  CHECK(job_owner.size() > 20);
}

TEST_CASE("file repository survives restarts and torn tails") {
  test::TempDir dir;
  auto const path = dir.path() / "gw.jsonl";
  UserAccount u{"u1", "alice", "hash", from_unix_micros(5)};
  UploadRecord up{"up1", "u1", std::string(64, 'a'), "/x", GeoPoint{1, 2}, from_unix_micros(6)};
  JobRecord job;
  job.job_id = "j1";
  job.owner = "u1";
  job.upload_id = "up1";
  job.conf_threshold = 0.4;
  StoredResult res{"j1", "b", "w", {test::make_detection("blast", 0.7, {0.5, 0.5, 0.2, 0.2})},
                   std::nullopt, from_unix_micros(9)};
  OutbreakReport rep{"j1:blast", "j1", class_index("blast"), {1, 2}, from_unix_micros(9)};
  {
    FileRepository repo(path);
    repo.insert_user(u);
    repo.insert_token({"th", "u1", from_unix_micros(100)});
    repo.insert_upload(up);
    repo.insert_job(job);
    CHECK(repo.update_job("j1", [](JobRecord& j) {
      j.status = JobStatus::kProcessing;
      return true;
    }));
    CHECK(repo.complete_job(res, {rep}));
    CHECK_FALSE(repo.complete_job(res, {rep}));
  }
  {
    std::ofstream(path, std::ios::app) << R"({"k":"job","v":{"job_id":"j2")";
  }
  FileRepository again(path);
  CHECK(again.replayed() == 6);
  CHECK(again.user_by_name("alice") == u);
  CHECK(again.token("th")->user_id == "u1");
  CHECK(again.upload("up1") == up);
  auto const j = again.job("j1");
  REQUIRE(j);
  CHECK(j->status == JobStatus::kDone);
  CHECK(j->conf_threshold == 0.4);
  CHECK(again.result("j1") == res);
  CHECK(again.outbreaks() == std::vector<OutbreakReport>{rep});
  CHECK_FALSE(again.job("j2"));
  CHECK(code_of([&] { again.insert_user(u); }) == ErrorCode::kConflict);
  again.insert_job([&] {
    auto k = job;
    k.job_id = "j3";
    return k;
  }());
  FileRepository third(path);
  CHECK(third.job("j3"));
  CHECK(third.replayed() == 7);

  std::ofstream(path, std::ios::app) << "not json\n{}\n";
  CHECK(code_of([&] { FileRepository broken(path); }) == ErrorCode::kIo);
}

TEST_CASE("server configuration from the environment") {
  std::map<std::string, std::string> env{{"PADDY_LISTEN", "127.0.0.1:9001"},
                                         {"PADDY_DATA_DIR", "/tmp/pd"},
                                         {"PADDY_TOKEN_TTL_SECONDS", "60"},
                                         {"PADDY_BROKER_KEY", "k"},
                                         {"PADDY_DURABLE_QUEUES", "false"}};
  auto lookup = [&](std::string const& k) -> std::optional<std::string> {
    auto it = env.find(k);
    if (it == env.end()) return std::nullopt;
    return it->second;
  };
  auto c = ServerConfig::from_env(lookup);
  CHECK(c.host == "127.0.0.1");
  CHECK(c.port == 9001);
  CHECK(c.data_dir == "/tmp/pd");
  CHECK(c.token_ttl == std::chrono::seconds(60));
  CHECK(c.broker_key == "k");
  CHECK_FALSE(c.durable_queues);
  CHECK(c.pbkdf2_iterations == kDefaultPbkdf2Iterations);
  env["PADDY_LISTEN"] = "nohost";
  CHECK(code_of([&] { ServerConfig::from_env(lookup); }) == ErrorCode::kInvalidInput);
  env["PADDY_LISTEN"] = "h:1";
  env["PADDY_TOKEN_TTL_SECONDS"] = "-4";
  CHECK(code_of([&] { ServerConfig::from_env(lookup); }) == ErrorCode::kInvalidInput);
}

json body_of(httplib::Result const& r) { return json::parse(r->body); }

TEST_CASE("HTTP API end to end with an embedded worker pool") {
  test::TempDir dir;
  ServerConfig cfg;
  cfg.host = "127.0.0.1";
  cfg.port = 0;
  cfg.data_dir = dir.path();
  cfg.pbkdf2_iterations = 1000;
  cfg.broker_key = "internal-key";
  GatewayServer server(cfg);
  server.start();

  auto png = test::leaf_png(77);
  auto store = std::make_shared<inference::FixtureStore>();
  store->set_detections(sha256_hex(png), {test::make_detection("blast", 0.9, {0.3, 0.3, 0.2, 0.2}),
                                          test::make_detection("tungro", 0.8, {0.7, 0.7, 0.2, 0.2})});
  inference::BackendSpec spec;
  spec.backend_id = "fixture-a";
  spec.fixtures = store;
  spec.classify = false;
  orchestrator::MasterConfig mc;
  mc.backends["fixture-a"] = inference::backend_factory(spec);
  mc.pools[TaskKind::kDetection] = {1, "fixture-a", ""};
  mc.worker.heartbeat_interval = 50ms;
  mc.worker.poll = 20ms;
  auto blobs = server.blobs();
  // Workers reach the broker and images through the internal routes.
  auto remote = std::make_shared<broker::RemoteBroker>("127.0.0.1", server.port(), "internal-key");
  auto master = orchestrator::Master::start(
      mc, remote, remote_image_source("127.0.0.1", server.port(), "internal-key"));

  httplib::Client cli("127.0.0.1", server.port());
  auto reg = cli.Post("/auth/register", R"({"username":"alice","password":"wonderland"})", "application/json");
  REQUIRE(reg);
  CHECK(reg->status == 201);
  CHECK(cli.Post("/auth/register", R"({"username":"alice","password":"wonderland"})", "application/json")->status == 409);
  CHECK(cli.Post("/auth/register", R"({"username":"x"})", "application/json")->status == 400);
  CHECK(cli.Post("/auth/login", R"({"username":"alice","password":"wrong-one"})", "application/json")->status == 401);
  auto login = cli.Post("/auth/login", R"({"username":"alice","password":"wonderland"})", "application/json");
  REQUIRE(login->status == 200);
  auto const token = body_of(login)["token"].get<std::string>();
  httplib::Headers const auth{{"Authorization", "Bearer " + token}};

  CHECK(cli.Get("/outbreaks")->status == 401);
  httplib::MultipartFormDataItems form{{"file", png, "leaf.png", "image/png"},
                                       {"lat", "27.5", "", ""},
                                       {"lon", "85.25", "", ""}};
  auto up = cli.Post("/images", auth, form);
  REQUIRE(up);
  REQUIRE(up->status == 201);
  auto const upload_id = body_of(up)["upload_id"].get<std::string>();
  CHECK(body_of(up)["image_digest"] == sha256_hex(png));
  httplib::MultipartFormDataItems text{{"file", "hello", "a.txt", "text/plain"}};
  auto bad = cli.Post("/images", auth, text);
  CHECK(bad->status == 415);
  CHECK(body_of(bad)["error"] == "UnsupportedMedia");
  httplib::MultipartFormDataItems half{{"file", png, "leaf.png", "image/png"}, {"lat", "1", "", ""}};
  CHECK(cli.Post("/images", auth, half)->status == 400);

  auto job = cli.Post("/jobs", auth, json{{"upload_id", upload_id}, {"task_kind", "detection"}}.dump(),
                      "application/json");
  REQUIRE(job);
  REQUIRE(job->status == 202);
  auto const job_id = body_of(job)["job_id"].get<std::string>();
  CHECK(body_of(job)["status"] == "queued");
  CHECK(cli.Post("/jobs", auth, R"({"upload_id":"00","task_kind":"detection"})", "application/json")->status == 404);
  CHECK(cli.Post("/jobs", auth, json{{"upload_id", upload_id}, {"task_kind", "pose"}}.dump(), "application/json")->status == 400);

  std::vector<std::string> seen;
  for (int i = 0; i < 500; ++i) {
    auto s = cli.Get("/jobs/" + job_id, auth);
    REQUIRE(s->status == 200);
    auto const st = body_of(s)["status"].get<std::string>();
    if (seen.empty() || seen.back() != st) seen.push_back(st);
    if (st == "done" || st == "failed") break;
    if (st != "done") {
      auto early = cli.Get("/jobs/" + job_id + "/result", auth);
      if (early->status == 409) CHECK(body_of(early)["status"] != "done");
    }
    std::this_thread::sleep_for(20ms);
  }
  REQUIRE(seen.back() == "done");
  std::map<std::string, int> rank{{"queued", 0}, {"processing", 1}, {"done", 2}};
  for (std::size_t i = 1; i < seen.size(); ++i) CHECK(rank[seen[i - 1]] < rank[seen[i]]);

  auto result = cli.Get("/jobs/" + job_id + "/result", auth);
  REQUIRE(result->status == 200);
  auto const r = body_of(result);
  CHECK(r["backend_id"] == "fixture-a");
  CHECK(r["detections"].size() == 2);
  REQUIRE(r["treatments"].size() == 2);
  CHECK(r["treatments"][0]["class"] == "blast");
  CHECK(r["treatments"][1]["class"] == "tungro");

  auto outbreaks = cli.Get("/outbreaks?min_lat=27&min_lon=85&max_lat=28&max_lon=86", auth);
  REQUIRE(outbreaks->status == 200);
  auto const groups = body_of(outbreaks);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0]["class"] == "blast");
  CHECK(groups[0]["count"] == 1);
  CHECK(groups[0]["centroid"]["lat"] == 27.5);
  CHECK(cli.Get("/outbreaks?min_lat=28&max_lat=27", auth)->status == 400);
  CHECK(cli.Get("/outbreaks?min_lat=abc", auth)->status == 400);

  auto tr = cli.Get("/treatments/normal");
  REQUIRE(tr->status == 200);
  CHECK(body_of(tr)["actions"].empty());
  CHECK(cli.Get("/treatments/rice_smut")->status == 404);

  // Another user sees none of it.
  cli.Post("/auth/register", R"({"username":"bob_2","password":"builder!"})", "application/json");
  auto const bob = body_of(cli.Post("/auth/login", R"({"username":"bob_2","password":"builder!"})", "application/json"))["token"].get<std::string>();
  httplib::Headers const bob_auth{{"Authorization", "Bearer " + bob}};
  CHECK(cli.Get("/jobs/" + job_id, bob_auth)->status == 403);
  CHECK(cli.Get("/jobs/" + job_id + "/result", bob_auth)->status == 403);
  CHECK(cli.Post("/jobs", bob_auth, json{{"upload_id", upload_id}, {"task_kind", "detection"}}.dump(), "application/json")->status == 403);

  CHECK(cli.Get("/internal/blobs/" + sha256_hex(png))->status == 401);
  auto blob = cli.Get("/internal/blobs/" + sha256_hex(png), {{"X-Broker-Key", "internal-key"}});
  CHECK(blob->body == png);
  CHECK(cli.Get("/health")->status == 200);

  master->stop();
  server.stop();
}

}  // namespace
}  // namespace paddy::gateway
