#pragma once

#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cpt/domain.hpp"

namespace cpt {

struct ChatRequest {
    std::string model;
    std::vector<Message> messages;
    DecodingParams decoding;
};

struct ChatResult {
    std::string text;
    ProviderStatus status = ProviderStatus::Ok;
    std::optional<TokenUsage> usage;
    int retries = 0;
    std::string error;
};

// Blocking concurrency primitives shared by the gateway: callers that exceed
// a cap wait, they never fail.
class Semaphore {
public:
    explicit Semaphore(int count) : count_(count) {}
    void acquire();
    void release();

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int count_;
};

class TokenBucket {
public:
    TokenBucket(double tokens_per_second, double burst);
    void take();  // blocks until a token is available

private:
    std::mutex mu_;
    double rate_;
    double burst_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
};

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds base_delay{200};
    double multiplier = 2.0;
    std::chrono::milliseconds max_delay{8000};
    double jitter = 0.1;  // +/- fraction of the delay
};

struct GatewayLimits {
    int per_target_inflight = 4;
    int global_inflight = 16;
    double requests_per_second = 8.0;
    double burst = 8.0;
};

// HTTP client for chat-completion endpoints (POST {endpoint}/chat/completions,
// bearer auth from CPT_KEY_<auth_ref>). Retries 408/429/5xx and transport
// errors with exponential backoff; auth failures are not retried.
class HttpChatClient {
public:
    explicit HttpChatClient(GatewayLimits limits = {}, RetryPolicy retry = {});
    ~HttpChatClient();

    ChatResult complete_chat(const ModelTarget& target, const ChatRequest& request);

private:
    struct TargetState;
    TargetState& state_for(const std::string& name);

    GatewayLimits limits_;
    RetryPolicy retry_;
    Semaphore global_inflight_;
    std::mutex mu_;
    std::map<std::string, std::unique_ptr<TargetState>> targets_;
};

// ---------------------------------------------------------------------------
// Mock lab
// ---------------------------------------------------------------------------

// Behavior of one (vulnerability, condition) cell of a scripted provider.
struct ProfileCell {
    double manifest_prob = 0.0;
    // Added to the attack manifest_prob when the mitigated cell is derived.
    double backfire_delta = 0.0;
    double stance_drift_per_turn = 0.0;
    double verbosity_mean_words = 90.0;
    double verbosity_sd_words = 12.0;
    bool add_distractors = false;
};

class ProviderProfile {
public:
    ProviderProfile() = default;

    static ProviderProfile from_json(const nlohmann::json& j);
    static ProviderProfile load_file(const std::string& path);
    nlohmann::ordered_json to_json() const;
    std::string digest() const;

    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }
    void set_cell(Vulnerability v, Condition c, ProfileCell cell);

    // Explicit cell, or for Mitigated the attack cell with manifest_prob
    // shifted by backfire_delta and clamped to [0,1]. Throws on a missing
    // behavior cell.
    ProfileCell cell(Vulnerability v, Condition c) const;

private:
    std::string name_ = "mock";
    std::map<std::pair<Vulnerability, Condition>, ProfileCell> cells_;
};

// Deterministic scripted completion: a pure function of
// (profile, spec.seed, request). Draws the manifest decision once per trial
// and emits canned vulnerability-manifesting or safe text that the
// behavioral metrics can score.
std::string scripted_complete(const ProviderProfile& profile, const TrialSpec& spec,
                              const ChatRequest& request);

// ---------------------------------------------------------------------------
// DOI verification
// ---------------------------------------------------------------------------

struct DoiVerdict {
    std::string doi;  // normalized: lowercase, no URL/"doi:" prefix
    bool exists = false;
    int http_status = 0;
    std::string checked_at;
    bool unverifiable = false;  // network failure or fixture miss
};

// Normalization: strips doi.org / dx.doi.org URL prefixes and "doi:",
// lowercases.
std::string normalize_doi(const std::string& raw);
bool is_valid_doi_syntax(const std::string& raw);

// HEAD against the resolver (or an offline fixture table). Verdicts are
// cached for the verifier's lifetime: a repeated query never touches the
// network again.
class DoiVerifier {
public:
    static DoiVerifier online(std::string resolver_base = "https://doi.org");
    static DoiVerifier offline_fixture(const std::string& csv_path);
    static DoiVerifier offline_table(std::map<std::string, bool> table);

    DoiVerdict verify(const std::string& doi);
    int network_calls() const { return network_calls_; }
    bool offline() const { return offline_; }
    std::string fixture_digest() const { return fixture_digest_; }

private:
    DoiVerifier() = default;

    bool offline_ = true;
    std::string resolver_base_;
    std::map<std::string, bool> fixture_;
    std::string fixture_digest_;
    std::map<std::string, DoiVerdict> cache_;
    std::mutex mu_;
    int network_calls_ = 0;
};

// Uniform surface the orchestrator drives; live and mock both implement it.
class TrialClient {
public:
    virtual ~TrialClient() = default;
    virtual ChatResult complete(const ModelTarget& target, const TrialSpec& spec,
                                const ChatRequest& request) = 0;
};

class LiveTrialClient : public TrialClient {
public:
    explicit LiveTrialClient(GatewayLimits limits = {}, RetryPolicy retry = {})
        : client_(limits, retry) {}
    ChatResult complete(const ModelTarget& target, const TrialSpec&,
                        const ChatRequest& request) override {
        return client_.complete_chat(target, request);
    }

private:
    HttpChatClient client_;
};

class MockTrialClient : public TrialClient {
public:
    explicit MockTrialClient(ProviderProfile profile, int delay_ms = 0)
        : profile_(std::move(profile)), delay_ms_(delay_ms) {}
    ChatResult complete(const ModelTarget& target, const TrialSpec& spec,
                        const ChatRequest& request) override;
    const ProviderProfile& profile() const { return profile_; }

private:
    ProviderProfile profile_;
    int delay_ms_;  // artificial per-call latency, used by crash tests
};

}  // namespace cpt
