#include "lam/providers.hpp"

#include <cmath>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace lam {

using nlohmann::json;

namespace {

constexpr double kSumTolerance = 1e-6;

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorCode::Provider, message); }

const char* endpoint(Task t) {
  switch (t) {
    case Task::Nli: return "/v1/nli";
    case Task::FillMask: return "/v1/fill_mask";
    case Task::Qa: return "/v1/qa";
  }
  return "";
}

json request_body(const PredictionRequest& req) {
  switch (req.task) {
    case Task::Nli: return {{"premise", req.first}, {"hypothesis", req.second}};
    case Task::FillMask: return {{"text", req.first}, {"k", req.k}};
    case Task::Qa: return {{"question", req.first}, {"context", req.second}};
  }
  return {};
}

double read_prob(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) fail(where + ": missing numeric '" + key + "'");
  const double p = it->get<double>();
  if (!(p >= 0.0 && p <= 1.0)) fail(where + ": '" + key + "' outside [0,1]");
  return p;
}

AltDistribution fixed_labels(const json& body, std::initializer_list<const char*> labels,
                             const std::string& where) {
  auto it = body.find("probs");
  if (it == body.end() || !it->is_object()) fail(where + ": missing 'probs' object");
  if (it->size() != labels.size()) fail(where + ": 'probs' must have exactly the task's labels");
  std::vector<Alternative> alts;
  double sum = 0.0;
  for (const char* l : labels) {
    alts.push_back({l, read_prob(*it, l, where)});
    sum += alts.back().prob;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    fail(where + ": probabilities sum to " + std::to_string(sum) + ", expected 1");
  return AltDistribution(std::move(alts), true);
}

std::string key_of(Task t, std::string_view first, std::string_view second) {
  json j{{"task", task_name(t)}, {"first", first}, {"second", second}};
  return j.dump();
}

std::string nli_body(nli::Label l) {
  json probs{{"entailment", 0.0}, {"contradiction", 0.0}, {"neutral", 0.0}};
  switch (l) {
    case nli::Label::Entailment: probs["entailment"] = 1.0; break;
    case nli::Label::Contradiction: probs["contradiction"] = 1.0; break;
    case nli::Label::Neutral: probs["neutral"] = 1.0; break;
    case nli::Label::NotEntailment:
      probs["contradiction"] = 0.5;
      probs["neutral"] = 0.5;
      break;
  }
  return json{{"probs", probs}, {"model", "gold"}}.dump();
}

std::string qa_body(Answer a) {
  json probs{{"yes", a == Answer::Yes ? 1.0 : 0.0}, {"no", a == Answer::Yes ? 0.0 : 1.0}};
  return json{{"probs", probs}, {"model", "gold"}}.dump();
}

void add_gold(std::unordered_map<std::string, std::string>& entries, std::string key,
              std::string body) {
  auto [it, inserted] = entries.emplace(std::move(key), body);
  if (!inserted && it->second != body)
    throw Error(ErrorCode::Data, "conflicting gold labels for the same query " + it->first);
}

}  // namespace

std::string_view task_name(Task t) {
  switch (t) {
    case Task::Nli: return "nli";
    case Task::FillMask: return "fill_mask";
    case Task::Qa: return "qa";
  }
  return "";
}

PredictionRequest PredictionRequest::nli(std::string premise, std::string hypothesis) {
  return {Task::Nli, std::move(premise), std::move(hypothesis), 0};
}

PredictionRequest PredictionRequest::fill_mask(std::string text, std::size_t k) {
  return {Task::FillMask, std::move(text), {}, k};
}

PredictionRequest PredictionRequest::qa(std::string question, std::string context) {
  return {Task::Qa, std::move(question), std::move(context), 0};
}

std::string PredictionRequest::key() const {
  json j{{"task", task_name(task)}, {"first", first}, {"second", second}, {"k", k}};
  return j.dump();
}

PredictionResponse validate_response(const PredictionRequest& req, std::string_view text) {
  const std::string where = std::string(task_name(req.task)) + " response";
  json body;
  try {
    body = json::parse(text);
  } catch (const json::exception& e) {
    fail(where + ": malformed JSON: " + e.what());
  }
  if (!body.is_object()) fail(where + ": body must be an object");
  PredictionResponse out;
  if (auto m = body.find("model"); m != body.end()) {
    if (!m->is_string()) fail(where + ": 'model' must be a string");
    out.model = m->get<std::string>();
  }
  switch (req.task) {
    case Task::Nli:
      out.distribution = fixed_labels(body, {"entailment", "contradiction", "neutral"}, where);
      break;
    case Task::Qa:
      out.distribution = fixed_labels(body, {"yes", "no"}, where);
      break;
    case Task::FillMask: {
      auto it = body.find("candidates");
      if (it == body.end() || !it->is_array() || it->empty())
        fail(where + ": missing nonempty 'candidates' array");
      if (req.k > 0 && it->size() > req.k)
        fail(where + ": " + std::to_string(it->size()) + " candidates for k=" +
             std::to_string(req.k));
      std::vector<Alternative> alts;
      std::set<std::string> seen;
      double sum = 0.0;
      for (const auto& c : *it) {
        if (!c.is_object() || !c.contains("token") || !c.at("token").is_string())
          fail(where + ": candidate without a string 'token'");
        const auto token = c.at("token").get<std::string>();
        if (!seen.insert(token).second) fail(where + ": duplicate token '" + token + "'");
        const double p = read_prob(c, "prob", where);
        if (!alts.empty() && p > alts.back().prob) fail(where + ": candidates not descending");
        alts.push_back({token, p});
        sum += p;
      }
      if (sum > 1.0 + kSumTolerance)
        fail(where + ": top-k mass " + std::to_string(sum) + " exceeds 1");
      out.distribution = AltDistribution(std::move(alts));
      if (sum < 1.0 - kSumTolerance) {
        if (sum <= 0.0) fail(where + ": top-k mass is zero");
        out.renormalized = out.distribution.renormalized();
        out.notes.push_back("fill_mask top-k renormalized from mass " + std::to_string(sum));
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

FixtureProvider FixtureProvider::from_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    fail(e.what());
  }
  return from_text(text, path.string());
}

FixtureProvider FixtureProvider::from_text(std::string_view text, std::string source) {
  FixtureProvider fx;
  fx.source_ = std::move(source);
  std::vector<std::string> errors;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = fx.source_ + ":" + std::to_string(line_no) + ": ";
    try {
      const json j = json::parse(line);
      const auto task = j.at("task").get<std::string>();
      PredictionRequest req;
      json body{{"model", j.value("model", std::string("fixture"))}};
      if (task == "nli") {
        req = PredictionRequest::nli(j.at("premise").get<std::string>(),
                                     j.at("hypothesis").get<std::string>());
        body["probs"] = j.at("probs");
      } else if (task == "qa") {
        req = PredictionRequest::qa(j.at("question").get<std::string>(),
                                    j.at("context").get<std::string>());
        body["probs"] = j.at("probs");
      } else if (task == "fill_mask") {
        req = PredictionRequest::fill_mask(j.at("text").get<std::string>(), 0);
        body["candidates"] = j.at("candidates");
      } else {
        throw Error(ErrorCode::Provider, "unknown task '" + task + "'");
      }
      const std::string serialized = body.dump();
      validate_response(req, serialized);
      auto [it, inserted] = fx.entries_.emplace(key_of(req.task, req.first, req.second), serialized);
      if (!inserted) errors.push_back(where + "duplicate fixture entry");
    } catch (const std::exception& e) {
      errors.push_back(where + e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = std::to_string(errors.size()) + " invalid fixture line(s)";
    for (const auto& e : errors) msg += "\n  " + e;
    fail(msg);
  }
  return fx;
}

PredictionResponse FixtureProvider::get(const PredictionRequest& req) {
  auto it = entries_.find(key_of(req.task, req.first, req.second));
  if (it == entries_.end())
    fail("fixture miss for " + std::string(task_name(req.task)) + " query " + req.key());
  if (req.task != Task::FillMask || req.k == 0) return validate_response(req, it->second);
  json body = json::parse(it->second);
  auto& cands = body["candidates"];
  if (cands.size() > req.k) cands.erase(cands.begin() + static_cast<std::ptrdiff_t>(req.k), cands.end());
  return validate_response(req, body.dump());
}

// ---------------------------------------------------------------------------

GoldProvider::GoldProvider(const std::vector<NliRecord>& records) {
  for (const auto& r : records) {
    const auto& g = r.gold;
    auto put = [&](const std::string& a, const std::string& b, const std::optional<nli::Label>& l) {
      if (l) add_gold(entries_, key_of(Task::Nli, a, b), nli_body(*l));
    };
    put(r.context, r.hypothesis, g.c_h);
    put(r.hypothesis, r.context, g.h_c);
    if (r.has_scope()) {
      put(*r.presupposed, r.hypothesis, g.p_h);
      put(r.hypothesis, *r.scoped, g.h_cprime);
    }
    if (r.neg_hypothesis) put(r.context, *r.neg_hypothesis, g.c_not_h);
    if (r.neg_context) put(*r.neg_context, r.hypothesis, g.not_c_h);
    if (r.neg_context && r.neg_hypothesis) put(*r.neg_context, *r.neg_hypothesis, g.not_c_not_h);
  }
}

GoldProvider::GoldProvider(const std::vector<QaRecord>& records) {
  for (const auto& r : records) {
    add_gold(entries_, key_of(Task::Qa, r.question, r.context), qa_body(r.gold));
    if (r.positive_context) {
      const Answer twin = r.gold == Answer::Yes ? Answer::No : Answer::Yes;
      add_gold(entries_, key_of(Task::Qa, r.question, *r.positive_context), qa_body(twin));
    }
  }
}

PredictionResponse GoldProvider::get(const PredictionRequest& req) {
  auto it = entries_.find(key_of(req.task, req.first, req.second));
  if (it == entries_.end()) fail("no gold label for query " + req.key());
  return validate_response(req, it->second);
}

// ---------------------------------------------------------------------------

RemoteProvider::RemoteProvider(std::string base_url, RemoteOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  if (options_.max_in_flight == 0)
    throw Error(ErrorCode::InvalidArgument, "max_in_flight must be positive");
  if (options_.retries < 0) throw Error(ErrorCode::InvalidArgument, "retries must be >= 0");
}

std::size_t RemoteProvider::max_observed_in_flight() const {
  std::lock_guard lock(mu_);
  return max_observed_;
}

PredictionResponse RemoteProvider::get(const PredictionRequest& req) {
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
    ++in_flight_;
    max_observed_ = std::max(max_observed_, in_flight_);
  }
  struct Release {
    RemoteProvider* self;
    ~Release() {
      {
        std::lock_guard lock(self->mu_);
        --self->in_flight_;
      }
      self->cv_.notify_one();
    }
  } release{this};

  const std::string payload = request_body(req).dump();
  const auto started = std::chrono::steady_clock::now();
  auto backoff = options_.backoff;
  std::string last_failure;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(base_url_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    auto res = client.Post(endpoint(req.task), payload, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 503) {
      last_failure = "model loading (503)";
      continue;
    }
    if (res->status == 400) {
      std::string reason = res->body;
      try {
        reason = json::parse(res->body).at("error").get<std::string>();
      } catch (const std::exception&) {
      }
      fail(std::string(endpoint(req.task)) + " rejected request: " + reason);
    }
    if (res->status != 200)
      fail(std::string(endpoint(req.task)) + " returned status " + std::to_string(res->status));
    auto out = validate_response(req, res->body);
    out.latency = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - started);
    return out;
  }
  fail(base_url_ + endpoint(req.task) + " failed after " + std::to_string(options_.retries + 1) +
       " attempt(s): " + last_failure);
}

// ---------------------------------------------------------------------------

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

PredictionResponse CachingProvider::get(const PredictionRequest& req) {
  const std::string key = req.key();
  const std::uint64_t h = fnv1a(key);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(h); it != cache_.end()) {
      for (const auto& [k, resp] : it->second) {
        if (k == key) {
          ++hits_;
          return resp;
        }
      }
    }
    ++misses_;
  }
  auto resp = inner_->get(req);
  std::lock_guard lock(mu_);
  auto& bucket = cache_[h];
  for (const auto& entry : bucket) {
    if (entry.first == key) return entry.second;
  }
  bucket.emplace_back(key, resp);
  return resp;
}

std::size_t CachingProvider::hits() const {
  std::lock_guard lock(mu_);
  return hits_;
}

std::size_t CachingProvider::misses() const {
  std::lock_guard lock(mu_);
  return misses_;
}

PredictionResponse RecordingProvider::get(const PredictionRequest& req) {
  {
    std::lock_guard lock(mu_);
    log_.push_back(req);
  }
  return inner_->get(req);
}

std::vector<PredictionRequest> RecordingProvider::log() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::shared_ptr<Provider> make_provider(std::string_view spec, RemoteOptions options) {
  if (spec.starts_with("fixture:"))
    return std::make_shared<FixtureProvider>(FixtureProvider::from_file(spec.substr(8)));
  if (spec.starts_with("http://") || spec.starts_with("https://"))
    return std::make_shared<RemoteProvider>(std::string(spec), options);
  if (spec.starts_with("http:")) {
    std::string rest(spec.substr(5));
    if (rest.starts_with("//")) rest.erase(0, 2);
    if (!rest.starts_with("http://") && !rest.starts_with("https://")) rest = "http://" + rest;
    return std::make_shared<RemoteProvider>(rest, options);
  }
  throw Error(ErrorCode::InvalidArgument,
              "provider must be fixture:<path>, http:<url> or gold, got '" + std::string(spec) + "'");
}

}  // namespace lam
