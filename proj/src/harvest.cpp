// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include "nbtrace/harvest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "nbtrace/notebook.hpp"
#include "nbtrace/reporter.hpp"

namespace nbtrace::harvest {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::None:
      return "none";
    case RejectReason::Size:
      return "size";
    case RejectReason::Usability:
      return "usability";
    case RejectReason::Upvotes:
      return "upvotes";
    case RejectReason::Language:
      return "language";
    case RejectReason::Duplicate:
      return "duplicate";
  }
  return "none";
}

Millis backoff_nominal(int attempt) {
  if (attempt < 1) attempt = 1;
  if (attempt > kMaxBackoffAttempts) throw AbortedAfterMaxRetries();
  Millis d = kBackoffBase * (1LL << (attempt - 1));
  return std::min(d, kBackoffCap);
}

Millis backoff_schedule(int attempt, std::mt19937_64& rng) {
  Millis nominal = backoff_nominal(attempt);
  std::uniform_real_distribution<double> jitter(-kBackoffJitter, kBackoffJitter);
  double scaled = static_cast<double>(nominal.count()) * (1.0 + jitter(rng));
  return Millis(static_cast<Millis::rep>(std::llround(scaled)));
}

Decision accept_dataset(const DatasetMeta& meta, const HarvestConfig& config) {
  if (meta.size_bytes > config.max_dataset_bytes) return Decision::reject(RejectReason::Size);
  if (meta.usability_score < config.min_usability_score) return Decision::reject(RejectReason::Usability);
  return Decision::accept();
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

Decision accept_notebook(const NotebookMeta& meta, const HarvestConfig& config, const CrawlLedger& ledger) {
  if (meta.upvotes >= config.max_upvotes_exclusive) return Decision::reject(RejectReason::Upvotes);
  if (lower(meta.language_tag) != kTargetKernelLanguage) return Decision::reject(RejectReason::Language);
  if (ledger.notebook_visited(meta.ref)) return Decision::reject(RejectReason::Duplicate);
  return Decision::accept();
}

// Ledger

CrawlLedger::CrawlLedger(fs::path path) : path_(std::move(path)) {
  if (fs::exists(*path_)) {
    std::ifstream in(*path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      // A torn final line from a crash is ignored; every complete line before
      // it was flushed and survives.
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) continue;
      std::string kind = j.value("kind", "");
      if (kind == "dataset") {
        datasets_.insert(j.value("ref", ""));
      } else if (kind == "notebook") {
        std::string ref = j.value("ref", "");
        if (notebooks_.insert(ref).second) notebook_entries_.push_back({ref, j.value("dataset_ref", "")});
      } else if (kind == "cursor") {
        std::string query = j.value("query", "");
        if (j.value("exhausted", false)) {
          cursors_[query] = std::nullopt;
        } else {
          cursors_[query] = j.value("next_page", 1);
        }
      }
    }
  } else if (path_->has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path_->parent_path(), ec);
  }
  bool torn_tail = false;
  if (fs::exists(*path_) && fs::file_size(*path_) > 0) {
    std::ifstream tail(*path_, std::ios::binary);
    tail.seekg(-1, std::ios::end);
    torn_tail = tail.get() != '\n';
  }
  out_.open(*path_, std::ios::app);
  if (!out_) throw IOFailure("cannot open ledger " + path_->string());
  // Keep the next entry off the torn line.
  if (torn_tail) out_ << '\n' << std::flush;
}

std::optional<int> CrawlLedger::next_page(std::string_view query) const {
  auto it = cursors_.find(query);
  if (it == cursors_.end()) return 1;
  return it->second;
}

void CrawlLedger::append(const std::string& line) {
  if (!path_) return;
  std::lock_guard<std::mutex> lock(mu_);
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw IOFailure("failed writing ledger " + path_->string());
}

void CrawlLedger::mark_dataset(const std::string& ref) {
  if (!datasets_.insert(ref).second) return;
  append(json{{"kind", "dataset"}, {"ref", ref}}.dump());
}

void CrawlLedger::mark_notebook(const std::string& ref, const std::string& dataset_ref) {
  if (!notebooks_.insert(ref).second) return;
  notebook_entries_.push_back({ref, dataset_ref});
  append(json{{"kind", "notebook"}, {"ref", ref}, {"dataset_ref", dataset_ref}}.dump());
}

void CrawlLedger::set_cursor(const std::string& query, int next_page) {
  cursors_[query] = next_page;
  append(json{{"kind", "cursor"}, {"query", query}, {"next_page", next_page}}.dump());
}

void CrawlLedger::mark_exhausted(const std::string& query) {
  cursors_[query] = std::nullopt;
  append(json{{"kind", "cursor"}, {"query", query}, {"exhausted", true}}.dump());
}

// Time

Millis SystemClock::now() const {
  return std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep(Millis d) { std::this_thread::sleep_for(d); }

void Pacer::wait() {
  if (per_minute_ <= 0) return;
  Millis interval(60'000 / per_minute_);
  Millis now = clock_.now();
  if (last_ && now < *last_ + interval) {
    clock_.sleep(*last_ + interval - now);
    now = clock_.now();
  }
  last_ = now;
}

// Listing with the page cap

std::vector<DatasetMeta> list_datasets(HarvestClient& client, int page, const HarvestConfig& config) {
  if (page < 1 || page > config.max_pages) throw PageLimitExceeded(page);
  return client.list_datasets(page, config.page_size);
}

std::vector<NotebookMeta> list_notebooks(HarvestClient& client, const std::string& dataset_ref, int page,
                                         const HarvestConfig& config) {
  if (page < 1 || page > config.max_pages) throw PageLimitExceeded(page);
  return client.list_notebooks(dataset_ref, page, config.page_size);
}

// Metadata JSON

namespace {

DatasetMeta dataset_from_json(const json& j) {
  DatasetMeta m;
  m.ref = j.at("ref").get<std::string>();
  m.size_bytes = j.value("size_bytes", std::uint64_t{0});
  m.usability_score = j.value("usability_score", 0.0);
  m.title = j.value("title", "");
  return m;
}

NotebookMeta notebook_from_json(const json& j) {
  NotebookMeta m;
  m.ref = j.at("ref").get<std::string>();
  m.dataset_refs = j.value("dataset_refs", std::vector<std::string>{});
  m.upvotes = j.value("upvotes", 0);
  m.language_tag = j.value("language_tag", "");
  return m;
}

json dataset_to_json(const DatasetMeta& m) {
  return json{{"ref", m.ref}, {"size_bytes", m.size_bytes}, {"usability_score", m.usability_score}, {"title", m.title}};
}

json notebook_to_json(const NotebookMeta& m) {
  return json{{"ref", m.ref}, {"dataset_refs", m.dataset_refs}, {"upvotes", m.upvotes}, {"language_tag", m.language_tag}};
}

template <typename T, typename F>
std::vector<T> load_pages(const fs::path& dir, const std::string& prefix, F&& parse) {
  std::vector<T> all;
  for (int n = 1;; ++n) {
    fs::path file = dir / (prefix + std::to_string(n) + ".json");
    if (!fs::exists(file)) break;
    json arr = json::parse(read_text_file(file));
    for (const auto& j : arr) all.push_back(parse(j));
  }
  return all;
}

template <typename T>
std::vector<T> slice(const std::vector<T>& all, int page, int page_size) {
  std::size_t begin = static_cast<std::size_t>(page - 1) * static_cast<std::size_t>(page_size);
  if (begin >= all.size()) return {};
  std::size_t end = std::min(all.size(), begin + static_cast<std::size_t>(page_size));
  return std::vector<T>(all.begin() + static_cast<std::ptrdiff_t>(begin), all.begin() + static_cast<std::ptrdiff_t>(end));
}

}  // namespace

// Mock client

MockScenario load_scenario(const fs::path& file) {
  MockScenario s;
  if (!fs::exists(file)) return s;
  json j = json::parse(read_text_file(file));
  if (j.contains("rate_limit_after") && !j["rate_limit_after"].is_null()) {
    s.rate_limit_after = j["rate_limit_after"].get<int>();
  }
  if (j.contains("cooldown_seconds")) s.cooldown = Millis(j["cooldown_seconds"].get<long long>() * 1000);
  s.repeat = j.value("repeat", false);
  return s;
}

MockClient::MockClient(fs::path root, Clock& clock, int page_cap)
    : root_(std::move(root)), clock_(clock), page_cap_(page_cap) {
  scenario_ = load_scenario(root_ / "scenario.json");
  datasets_ = load_pages<DatasetMeta>(root_, "datasets_page_", dataset_from_json);
}

void MockClient::admit(const std::string& kind, const std::string& target, int page) {
  RequestLogEntry entry{kind, target, page, false, false};
  if (closed_until_) {
    Millis now = clock_.now();
    if (now < *closed_until_) {
      entry.rate_limited = true;
      log_.push_back(entry);
      throw RateLimited(*closed_until_ - now);
    }
    closed_until_.reset();
  }
  if (page > page_cap_) {
    log_.push_back(entry);
    throw PageLimitExceeded(page);
  }
  entry.ok = true;
  log_.push_back(entry);
}

std::vector<DatasetMeta> MockClient::list_datasets(int page, int page_size) {
  admit("list_datasets", "", page);
  return slice(datasets_, page, page_size);
}

DatasetPayload MockClient::download_dataset(const std::string& ref) {
  admit("download_dataset", ref, 0);
  fs::path dir = root_ / "datasets" / ref;
  DatasetPayload p;
  if (fs::exists(dir / "meta.json")) {
    p.metadata_json = read_text_file(dir / "meta.json");
  } else {
    auto it = std::find_if(datasets_.begin(), datasets_.end(), [&](const DatasetMeta& m) { return m.ref == ref; });
    if (it == datasets_.end()) throw NotFound("dataset " + ref);
    p.metadata_json = dataset_to_json(*it).dump(2) + "\n";
  }
  for (const char* name : {"data.csv", "data.zip"}) {
    if (fs::exists(dir / name)) {
      p.archive_name = name;
      p.archive = read_text_file(dir / name);
      break;
    }
  }
  return p;
}

std::vector<NotebookMeta> MockClient::list_notebooks(const std::string& dataset_ref, int page, int page_size) {
  admit("list_notebooks", dataset_ref, page);
  auto it = kernels_.find(dataset_ref);
  if (it == kernels_.end()) {
    fs::path dir = (root_ / "kernels" / dataset_ref).parent_path();
    std::string prefix = fs::path(dataset_ref).filename().string() + "_page_";
    it = kernels_.emplace(dataset_ref, load_pages<NotebookMeta>(dir, prefix, notebook_from_json)).first;
  }
  return slice(it->second, page, page_size);
}

std::string MockClient::download_notebook(const std::string& ref) {
  fs::path file = root_ / "notebooks" / (ref + ".ipynb");
  admit("download_notebook", ref, 0);
  if (!fs::exists(file)) {
    log_.back().ok = false;
    throw NotFound("notebook " + ref);
  }
  std::string text = read_text_file(file);
  ++notebook_downloads_;
  if (scenario_.rate_limit_after && *scenario_.rate_limit_after > 0) {
    int every = *scenario_.rate_limit_after;
    bool trip = scenario_.repeat ? notebook_downloads_ % every == 0 : notebook_downloads_ == every;
    if (trip) closed_until_ = clock_.now() + scenario_.cooldown;
  }
  return text;
}

// File sink

fs::path FileSink::notebook_path(const fs::path& root, const std::string& dataset_ref, const std::string& notebook_ref) {
  return root / dataset_ref / (notebook_ref + ".ipynb");
}

void FileSink::store_dataset(const DatasetMeta& meta, const DatasetPayload& payload) {
  fs::path dir = root_ / meta.ref;
  write_text_file(dir / "meta.json", payload.metadata_json.empty() ? dataset_to_json(meta).dump(2) + "\n"
                                                                   : payload.metadata_json);
  if (!payload.archive_name.empty()) write_text_file(dir / payload.archive_name, payload.archive);
}

void FileSink::store_notebook(const std::string& dataset_ref, const NotebookMeta& meta, const std::string& ipynb) {
  write_text_file(notebook_path(root_, dataset_ref, meta.ref), ipynb);
  write_text_file(root_ / dataset_ref / (meta.ref + ".meta.json"), notebook_to_json(meta).dump(2) + "\n");
}

// Crawl

namespace {

class Crawl {
 public:
  Crawl(HarvestClient& client, const HarvestConfig& config, CrawlLedger& ledger, HarvestSink& sink,
        const HarvestOptions& options)
      : client_(client),
        config_(config),
        ledger_(ledger),
        sink_(sink),
        clock_(options.clock != nullptr ? *options.clock : system_clock_),
        pacer_(clock_, options.rate_per_minute),
        rng_(options.seed),
        log_(options.log) {}

  HarvestResult run();

 private:
  template <typename F>
  auto with_retry(const char* what, F&& fn) -> decltype(fn());
  bool done() const;
  void say(const std::string& msg) const {
    if (log_) log_(msg);
  }
  // Returns true when the crawl should stop.
  bool crawl_dataset(const DatasetMeta& ds);

  HarvestClient& client_;
  const HarvestConfig& config_;
  CrawlLedger& ledger_;
  HarvestSink& sink_;
  SystemClock system_clock_;
  Clock& clock_;
  Pacer pacer_;
  std::mt19937_64 rng_;
  std::function<void(const std::string&)> log_;
  HarvestResult result_;
};

template <typename F>
auto Crawl::with_retry(const char* what, F&& fn) -> decltype(fn()) {
  int attempt = 0;
  while (true) {
    pacer_.wait();
    try {
      return fn();
    } catch (const RateLimited& e) {
      ++result_.rate_limit_events;
      Millis delay = backoff_schedule(++attempt, rng_);
      if (e.retry_after() && *e.retry_after() > delay) delay = *e.retry_after();
      say(std::string("rate limited during ") + what + "; retry " + std::to_string(attempt) + " in " +
          std::to_string(delay.count() / 1000) + " s");
      clock_.sleep(delay);
    } catch (const TransportError& e) {
      Millis delay = backoff_schedule(++attempt, rng_);
      say(std::string("transport error during ") + what + ": " + e.what() + "; retry " + std::to_string(attempt));
      clock_.sleep(delay);
    }
    ++result_.retries;
  }
}

bool Crawl::done() const {
  if (static_cast<int>(ledger_.visited_notebooks().size()) < config_.target_notebook_count) return false;
  std::set<std::string> datasets;
  for (const auto& e : ledger_.notebook_entries()) datasets.insert(e.dataset_ref);
  return static_cast<int>(datasets.size()) >= config_.min_distinct_datasets;
}

bool Crawl::crawl_dataset(const DatasetMeta& ds) {
  const std::string query = "kernels:" + ds.ref;
  std::optional<int> page = ledger_.next_page(query);
  if (!page) return false;
  if (!ledger_.dataset_visited(ds.ref)) {
    DatasetPayload payload = with_retry("download_dataset", [&] { return client_.download_dataset(ds.ref); });
    sink_.store_dataset(ds, payload);
    ledger_.mark_dataset(ds.ref);
  }
  ++result_.datasets_touched;
  result_.accepted_dataset_refs.push_back(ds.ref);
  result_.accepted_datasets.push_back(ds);

  while (*page <= config_.max_pages) {
    auto notebooks = with_retry("list_notebooks", [&] { return list_notebooks(client_, ds.ref, *page, config_); });
    ++result_.pages_visited;
    for (const NotebookMeta& nb : notebooks) {
      if (!accept_notebook(nb, config_, ledger_)) continue;
      std::string text;
      try {
        text = with_retry("download_notebook", [&] { return client_.download_notebook(nb.ref); });
      } catch (const NotFound& e) {
        say(std::string("skipping ") + e.what());
        continue;
      }
      sink_.store_notebook(ds.ref, nb, text);
      ledger_.mark_notebook(nb.ref, ds.ref);
      ++result_.notebooks_fetched;
      result_.fetched_notebook_refs.push_back(nb.ref);
      result_.fetched_notebooks.push_back(nb);
      // The cursor stays on this page; a resumed crawl re-lists it and the
      // ledger filters what was already fetched.
      if (done()) return true;
    }
    if (static_cast<int>(notebooks.size()) < config_.page_size) {
      ledger_.mark_exhausted(query);
      return false;
    }
    ledger_.set_cursor(query, ++*page);
  }
  return false;
}

HarvestResult Crawl::run() {
  if (config_.target_notebook_count <= 0 || done()) {
    result_.target_reached = true;
    return result_;
  }
  const std::string query = "datasets";
  std::optional<int> page = ledger_.next_page(query);
  while (page && *page <= config_.max_pages) {
    auto datasets = with_retry("list_datasets", [&] { return list_datasets(client_, *page, config_); });
    ++result_.pages_visited;
    for (const DatasetMeta& ds : datasets) {
      if (!accept_dataset(ds, config_)) continue;
      if (crawl_dataset(ds)) {
        result_.target_reached = true;
        return result_;
      }
    }
    if (static_cast<int>(datasets.size()) < config_.page_size) {
      ledger_.mark_exhausted(query);
      break;
    }
    ledger_.set_cursor(query, ++*page);
  }
  result_.target_reached = done();
  return result_;
}

}  // namespace

HarvestResult run_harvest(HarvestClient& client, const HarvestConfig& config, CrawlLedger& ledger, HarvestSink& sink,
                          const HarvestOptions& options) {
  return Crawl(client, config, ledger, sink, options).run();
}

}  // namespace nbtrace::harvest
