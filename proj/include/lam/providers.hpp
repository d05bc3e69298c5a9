#pragma once

// Base-model probability sources. All sources answer the same three request
// shapes and return validated distributions:
//
//   nli        premise, hypothesis  -> entailment, contradiction, neutral (sum 1 ± 1e-6)
//   fill_mask  text with [MASK], k  -> top-k candidates, descending, sum <= 1
//   qa         question, context    -> yes, no (sum 1 ± 1e-6)

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lam/adapters.hpp"
#include "lam/data.hpp"

namespace lam {

enum class Task { Nli, FillMask, Qa };

std::string_view task_name(Task t);

struct PredictionRequest {
  Task task = Task::Nli;
  std::string first;   // premise | masked text | question
  std::string second;  // hypothesis | unused | context
  std::size_t k = 0;   // fill_mask only

  static PredictionRequest nli(std::string premise, std::string hypothesis);
  static PredictionRequest fill_mask(std::string text, std::size_t k);
  static PredictionRequest qa(std::string question, std::string context);

  // Canonical text of the request; equal requests give equal keys.
  std::string key() const;
  friend bool operator==(const PredictionRequest&, const PredictionRequest&) = default;
};

struct PredictionResponse {
  AltDistribution distribution;
  std::optional<AltDistribution> renormalized;  // fill_mask with mass below 1
  std::string model;
  std::chrono::microseconds latency{0};
  std::vector<std::string> notes;
};

// Builds a response from a wire body, enforcing the per-task invariants.
// Throws Provider on any violation; never repairs nli or qa payloads.
PredictionResponse validate_response(const PredictionRequest& req, std::string_view body);

class Provider {
public:
  virtual ~Provider() = default;
  virtual PredictionResponse get(const PredictionRequest& req) = 0;
  virtual std::string describe() const = 0;
};

// Responses read from a JSONL file; lookups are by request content.
class FixtureProvider : public Provider {
public:
  static FixtureProvider from_file(const std::filesystem::path& path);
  static FixtureProvider from_text(std::string_view text, std::string source = "<fixture>");

  PredictionResponse get(const PredictionRequest& req) override;
  std::string describe() const override { return "fixture:" + source_; }
  std::size_t size() const { return entries_.size(); }

private:
  std::string source_;
  std::unordered_map<std::string, std::string> entries_;  // key -> response body
};

// One-hot distributions read off dataset gold labels.
class GoldProvider : public Provider {
public:
  explicit GoldProvider(const std::vector<NliRecord>& records);
  explicit GoldProvider(const std::vector<QaRecord>& records);

  PredictionResponse get(const PredictionRequest& req) override;
  std::string describe() const override { return "gold"; }

private:
  std::unordered_map<std::string, std::string> entries_;
};

struct RemoteOptions {
  int retries = 3;                                 // extra attempts after the first
  std::chrono::milliseconds backoff{100};          // doubled per retry
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds timeout{30000};
};

// Client for the model-probe wire protocol. Retries transport failures and
// 503 responses; any other status or an invalid payload fails immediately.
class RemoteProvider : public Provider {
public:
  explicit RemoteProvider(std::string base_url, RemoteOptions options = {});

  PredictionResponse get(const PredictionRequest& req) override;
  std::string describe() const override { return "http:" + base_url_; }
  std::size_t max_observed_in_flight() const;

private:
  std::string base_url_;
  RemoteOptions options_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
  std::size_t max_observed_ = 0;
};

// Memoizes another provider by request content hash.
class CachingProvider : public Provider {
public:
  explicit CachingProvider(std::shared_ptr<Provider> inner) : inner_(std::move(inner)) {}

  PredictionResponse get(const PredictionRequest& req) override;
  std::string describe() const override { return inner_->describe(); }
  std::size_t hits() const;
  std::size_t misses() const;

private:
  std::shared_ptr<Provider> inner_;
  mutable std::mutex mu_;
  std::unordered_map<std::uint64_t, std::vector<std::pair<std::string, PredictionResponse>>> cache_;
  std::size_t hits_ = 0, misses_ = 0;
};

// Records every request forwarded to the inner provider, in arrival order.
class RecordingProvider : public Provider {
public:
  explicit RecordingProvider(std::shared_ptr<Provider> inner) : inner_(std::move(inner)) {}

  PredictionResponse get(const PredictionRequest& req) override;
  std::string describe() const override { return inner_->describe(); }
  std::vector<PredictionRequest> log() const;

private:
  std::shared_ptr<Provider> inner_;
  mutable std::mutex mu_;
  std::vector<PredictionRequest> log_;
};

std::uint64_t fnv1a(std::string_view bytes);

// "fixture:<path>" or "http://host:port". "gold" is resolved by the harness.
std::shared_ptr<Provider> make_provider(std::string_view spec, RemoteOptions options = {});

}  // namespace lam
