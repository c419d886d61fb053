// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

// Dataset-first crawl of a Kaggle-style catalog: list datasets page by page,
// keep the small and usable ones, then pull their low-upvote notebooks.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nbtrace::harvest {

using Millis = std::chrono::milliseconds;

struct DatasetMeta {
  std::string ref;  // owner/slug
  std::uint64_t size_bytes = 0;
  double usability_score = 0.0;
  std::string title;

  bool operator==(const DatasetMeta&) const = default;
};

struct NotebookMeta {
  std::string ref;
  std::vector<std::string> dataset_refs;
  int upvotes = 0;
  std::string language_tag;

  bool operator==(const NotebookMeta&) const = default;
};

struct HarvestConfig {
  double min_usability_score = 0.7;
  std::uint64_t max_dataset_bytes = 10'000'000;
  int target_notebook_count = 100;
  int max_upvotes_exclusive = 10;
  int max_pages = 20;
  int page_size = 100;
  int min_distinct_datasets = 1;

  bool operator==(const HarvestConfig&) const = default;
};

enum class RejectReason { None, Size, Usability, Upvotes, Language, Duplicate };

std::string_view to_string(RejectReason reason);

struct Decision {
  bool accepted = true;
  RejectReason reason = RejectReason::None;

  static Decision accept() { return {}; }
  static Decision reject(RejectReason r) { return {false, r}; }
  explicit operator bool() const { return accepted; }
  bool operator==(const Decision&) const = default;
};

class RateLimited : public std::runtime_error {
 public:
  explicit RateLimited(std::optional<Millis> retry_after = std::nullopt)
      : std::runtime_error("rate limited"), retry_after_(retry_after) {}
  std::optional<Millis> retry_after() const { return retry_after_; }

 private:
  std::optional<Millis> retry_after_;
};

class PageLimitExceeded : public std::logic_error {
 public:
  explicit PageLimitExceeded(int page) : std::logic_error("page " + std::to_string(page) + " exceeds the page cap") {}
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AbortedAfterMaxRetries : public std::runtime_error {
 public:
  AbortedAfterMaxRetries() : std::runtime_error("aborted after the maximum number of retries") {}
};

inline constexpr int kMaxBackoffAttempts = 6;
inline constexpr Millis kBackoffBase{30'000};
inline constexpr Millis kBackoffCap{15 * 60'000};
inline constexpr double kBackoffJitter = 0.2;

/// Delay before retry `attempt` without jitter: 30 s * 2^(attempt-1), capped
/// at 15 min. Throws AbortedAfterMaxRetries past the sixth attempt.
Millis backoff_nominal(int attempt);

/// backoff_nominal with uniform +/-20% jitter drawn from `rng`.
Millis backoff_schedule(int attempt, std::mt19937_64& rng);

class CrawlLedger;

Decision accept_dataset(const DatasetMeta& meta, const HarvestConfig& config);
Decision accept_notebook(const NotebookMeta& meta, const HarvestConfig& config, const CrawlLedger& ledger);

/// Visited datasets and notebooks plus listing cursors, persisted as an
/// append-only JSON-lines file. Every mutation is flushed before returning.
class CrawlLedger {
 public:
  struct NotebookEntry {
    std::string ref;
    std::string dataset_ref;
  };

  /// In-memory ledger that never touches disk.
  CrawlLedger() = default;
  /// Replays `path` when it exists; later mutations are appended to it.
  explicit CrawlLedger(std::filesystem::path path);

  bool dataset_visited(std::string_view ref) const { return datasets_.count(ref) != 0; }
  bool notebook_visited(std::string_view ref) const { return notebooks_.count(ref) != 0; }
  const std::set<std::string, std::less<>>& visited_datasets() const { return datasets_; }
  const std::set<std::string, std::less<>>& visited_notebooks() const { return notebooks_; }
  /// Fetched notebooks in fetch order.
  const std::vector<NotebookEntry>& notebook_entries() const { return notebook_entries_; }

  /// Next page to request for `query`, 1 when unseen; nullopt once exhausted.
  std::optional<int> next_page(std::string_view query) const;

  void mark_dataset(const std::string& ref);
  void mark_notebook(const std::string& ref, const std::string& dataset_ref);
  void set_cursor(const std::string& query, int next_page);
  void mark_exhausted(const std::string& query);

 private:
  void append(const std::string& line);

  std::optional<std::filesystem::path> path_;
  std::ofstream out_;
  std::mutex mu_;
  std::set<std::string, std::less<>> datasets_;
  std::set<std::string, std::less<>> notebooks_;
  std::vector<NotebookEntry> notebook_entries_;
  std::map<std::string, std::optional<int>, std::less<>> cursors_;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Millis now() const = 0;
  virtual void sleep(Millis d) = 0;
};

class SystemClock : public Clock {
 public:
  Millis now() const override;
  void sleep(Millis d) override;
};

/// Virtual time for tests: sleeping advances the clock instantly.
class ManualClock : public Clock {
 public:
  Millis now() const override { return now_; }
  void sleep(Millis d) override { now_ += d; }
  void advance(Millis d) { now_ += d; }

 private:
  Millis now_{0};
};

/// Spaces requests so at most `per_minute` start in any minute. Zero
/// disables pacing.
class Pacer {
 public:
  Pacer(Clock& clock, int per_minute) : clock_(clock), per_minute_(per_minute) {}
  void wait();

 private:
  Clock& clock_;
  int per_minute_;
  std::optional<Millis> last_;
};

struct DatasetPayload {
  std::string metadata_json;
  std::string archive_name;  // empty when the payload has no content file
  std::string archive;
};

/// Remote catalog. Page numbers are 1-based.
class HarvestClient {
 public:
  virtual ~HarvestClient() = default;
  virtual std::vector<DatasetMeta> list_datasets(int page, int page_size) = 0;
  virtual DatasetPayload download_dataset(const std::string& ref) = 0;
  virtual std::vector<NotebookMeta> list_notebooks(const std::string& dataset_ref, int page, int page_size) = 0;
  virtual std::string download_notebook(const std::string& ref) = 0;
};

/// Checks the page cap, then asks the client.
std::vector<DatasetMeta> list_datasets(HarvestClient& client, int page, const HarvestConfig& config);
std::vector<NotebookMeta> list_notebooks(HarvestClient& client, const std::string& dataset_ref, int page,
                                         const HarvestConfig& config);

struct RequestLogEntry {
  std::string kind;  // list_datasets, download_dataset, list_notebooks, download_notebook
  std::string target;
  int page = 0;
  bool ok = false;
  bool rate_limited = false;
};

struct MockScenario {
  std::optional<int> rate_limit_after;  // successful notebook downloads before the limiter trips
  Millis cooldown{60'000};              // how long the limiter stays closed
  bool repeat = false;                  // trip again every `rate_limit_after` downloads
};

MockScenario load_scenario(const std::filesystem::path& file);

/// Serves a fixture directory:
///   datasets_page_<n>.json, datasets/<ref>/meta.json,
///   kernels/<dataset_ref>_page_<n>.json, notebooks/<ref>.ipynb, scenario.json.
/// Requests past `page_cap` fail the way the remote service would, and every
/// request is logged.
class MockClient : public HarvestClient {
 public:
  MockClient(std::filesystem::path root, Clock& clock, int page_cap = 20);

  std::vector<DatasetMeta> list_datasets(int page, int page_size) override;
  DatasetPayload download_dataset(const std::string& ref) override;
  std::vector<NotebookMeta> list_notebooks(const std::string& dataset_ref, int page, int page_size) override;
  std::string download_notebook(const std::string& ref) override;

  const std::vector<RequestLogEntry>& request_log() const { return log_; }
  const MockScenario& scenario() const { return scenario_; }
  void set_scenario(MockScenario s) { scenario_ = s; }

 private:
  // Logs the request; throws RateLimited while the limiter is closed and
  // PageLimitExceeded past the cap.
  void admit(const std::string& kind, const std::string& target, int page);

  std::filesystem::path root_;
  Clock& clock_;
  int page_cap_;
  MockScenario scenario_;
  std::vector<DatasetMeta> datasets_;
  std::map<std::string, std::vector<NotebookMeta>> kernels_;
  std::vector<RequestLogEntry> log_;
  int notebook_downloads_ = 0;
  std::optional<Millis> closed_until_;
};

/// Kaggle public API v1 over HTTPS with basic auth.
class LiveClient : public HarvestClient {
 public:
  LiveClient(std::string username, std::string key, std::string host = "www.kaggle.com");
  ~LiveClient() override;

  /// Reads KAGGLE_USERNAME and KAGGLE_KEY; throws TransportError when unset.
  static LiveClient from_environment();

  std::vector<DatasetMeta> list_datasets(int page, int page_size) override;
  DatasetPayload download_dataset(const std::string& ref) override;
  std::vector<NotebookMeta> list_notebooks(const std::string& dataset_ref, int page, int page_size) override;
  std::string download_notebook(const std::string& ref) override;

  LiveClient(LiveClient&&) noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Where fetched content goes.
class HarvestSink {
 public:
  virtual ~HarvestSink() = default;
  virtual void store_dataset(const DatasetMeta& meta, const DatasetPayload& payload) = 0;
  virtual void store_notebook(const std::string& dataset_ref, const NotebookMeta& meta, const std::string& ipynb) = 0;
};

/// root/<dataset_ref>/meta.json, root/<dataset_ref>/<archive>, and
/// root/<dataset_ref>/<notebook_ref>.ipynb.
class FileSink : public HarvestSink {
 public:
  explicit FileSink(std::filesystem::path root) : root_(std::move(root)) {}
  void store_dataset(const DatasetMeta& meta, const DatasetPayload& payload) override;
  void store_notebook(const std::string& dataset_ref, const NotebookMeta& meta, const std::string& ipynb) override;

  static std::filesystem::path notebook_path(const std::filesystem::path& root, const std::string& dataset_ref,
                                             const std::string& notebook_ref);

 private:
  std::filesystem::path root_;
};

struct HarvestResult {
  int notebooks_fetched = 0;
  int datasets_touched = 0;
  int pages_visited = 0;
  int rate_limit_events = 0;
  int retries = 0;
  std::vector<std::string> fetched_notebook_refs;
  std::vector<std::string> accepted_dataset_refs;
  std::vector<NotebookMeta> fetched_notebooks;
  std::vector<DatasetMeta> accepted_datasets;
  bool target_reached = false;
};

struct HarvestOptions {
  Clock* clock = nullptr;  // defaults to a SystemClock
  int rate_per_minute = 0;
  std::uint64_t seed = 0;  // backoff jitter
  std::function<void(const std::string&)> log;
};

HarvestResult run_harvest(HarvestClient& client, const HarvestConfig& config, CrawlLedger& ledger,
                          HarvestSink& sink, const HarvestOptions& options = {});

}  // namespace nbtrace::harvest
