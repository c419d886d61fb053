// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>

#include <json.hpp>

#include "nbtrace/harvest.hpp"
#include "nbtrace/notebook.hpp"

namespace nbtrace::harvest {

using json = nlohmann::json;

struct LiveClient::Impl {
  Impl(const std::string& user, const std::string& key, const std::string& host) : client("https://" + host) {
    client.set_basic_auth(user, key);
    client.set_follow_location(true);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
  }

  std::string get(const std::string& path, const httplib::Params& params) {
    auto res = client.Get(path, params, httplib::Headers{});
    if (!res) throw TransportError(path + ": " + httplib::to_string(res.error()));
    if (res->status == 429) {
      std::optional<Millis> retry_after;
      if (res->has_header("Retry-After")) {
        retry_after = Millis(std::atoll(res->get_header_value("Retry-After").c_str()) * 1000);
      }
      throw RateLimited(retry_after);
    }
    if (res->status == 404) throw NotFound(path);
    if (res->status >= 400) throw TransportError(path + ": HTTP " + std::to_string(res->status));
    return res->body;
  }

  json get_json(const std::string& path, const httplib::Params& params) {
    json j = json::parse(get(path, params), nullptr, false);
    if (j.is_discarded()) throw TransportError(path + ": response is not JSON");
    return j;
  }

  httplib::Client client;
};

LiveClient::LiveClient(std::string username, std::string key, std::string host)
    : impl_(std::make_unique<Impl>(username, key, host)) {}

LiveClient::~LiveClient() = default;
LiveClient::LiveClient(LiveClient&&) noexcept = default;

LiveClient LiveClient::from_environment() {
  const char* user = std::getenv("KAGGLE_USERNAME");
  const char* key = std::getenv("KAGGLE_KEY");
  if (user == nullptr || key == nullptr || *user == '\0' || *key == '\0') {
    throw TransportError("KAGGLE_USERNAME and KAGGLE_KEY must be set for live mode");
  }
  return LiveClient(user, key);
}

std::vector<DatasetMeta> LiveClient::list_datasets(int page, int page_size) {
  json arr = impl_->get_json("/api/v1/datasets/list",
                             {{"page", std::to_string(page)}, {"pageSize", std::to_string(page_size)}});
  std::vector<DatasetMeta> out;
  for (const auto& j : arr) {
    DatasetMeta m;
    m.ref = j.value("ref", "");
    m.size_bytes = j.value("totalBytes", std::uint64_t{0});
    m.usability_score = j.value("usabilityRating", 0.0);
    m.title = j.value("title", "");
    if (!m.ref.empty()) out.push_back(std::move(m));
  }
  return out;
}

DatasetPayload LiveClient::download_dataset(const std::string& ref) {
  DatasetPayload p;
  p.metadata_json = impl_->get_json("/api/v1/datasets/view/" + ref, {}).dump(2) + "\n";
  p.archive_name = "data.zip";
  p.archive = impl_->get("/api/v1/datasets/download/" + ref, {});
  return p;
}

std::vector<NotebookMeta> LiveClient::list_notebooks(const std::string& dataset_ref, int page, int page_size) {
  json arr = impl_->get_json("/api/v1/kernels/list", {{"page", std::to_string(page)},
                                                      {"pageSize", std::to_string(page_size)},
                                                      {"dataset", dataset_ref},
                                                      {"language", std::string(kTargetKernelLanguage)},
                                                      {"kernelType", "notebook"}});
  std::vector<NotebookMeta> out;
  for (const auto& j : arr) {
    NotebookMeta m;
    m.ref = j.value("ref", "");
    m.dataset_refs = {dataset_ref};
    m.upvotes = j.value("totalVotes", 0);
    // The listing is already filtered by language and does not always echo it.
    m.language_tag = j.value("language", std::string(kTargetKernelLanguage));
    if (!m.ref.empty()) out.push_back(std::move(m));
  }
  return out;
}

std::string LiveClient::download_notebook(const std::string& ref) {
  auto slash = ref.find('/');
  if (slash == std::string::npos) throw NotFound("notebook ref without owner: " + ref);
  json j = impl_->get_json("/api/v1/kernels/pull",
                           {{"userName", ref.substr(0, slash)}, {"kernelSlug", ref.substr(slash + 1)}});
  if (!j.contains("blob") || !j["blob"].contains("source")) throw TransportError("kernel pull without source: " + ref);
  return j["blob"]["source"].get<std::string>();
}

}  // namespace nbtrace::harvest
