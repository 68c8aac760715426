#include "pira/backend/remote.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include "httplib.h"

namespace pira::backend {

namespace {

using ojson = nlohmann::ordered_json;

std::string env_or_empty(const char* name) {
    const char* value = std::getenv(name);
    return value ? value : std::string();
}

std::string base64_encode(const std::string& bytes) {
    static constexpr char table[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= bytes.size()) {
        const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                           (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                           static_cast<unsigned char>(bytes[i + 2]);
        out += table[(v >> 18) & 63];
        out += table[(v >> 12) & 63];
        out += table[(v >> 6) & 63];
        out += table[v & 63];
        i += 3;
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        out += table[(v >> 18) & 63];
        out += table[(v >> 12) & 63];
        out += "==";
    } else if (rest == 2) {
        const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                           (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out += table[(v >> 18) & 63];
        out += table[(v >> 12) & 63];
        out += table[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

std::string image_payload_url(const std::string& payload,
                              const std::filesystem::path& image_root) {
    if (payload.rfind("http://", 0) == 0 || payload.rfind("https://", 0) == 0 ||
        payload.rfind("data:", 0) == 0)
        return payload;
    const auto path = image_root.empty() ? std::filesystem::path(payload)
                                         : image_root / payload;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BackendError("cannot read image payload: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    return "data:image/png;base64," + base64_encode(bytes);
}

ojson content_parts(const std::vector<std::pair<PayloadKind, std::string>>& frames,
                    const std::string& trailing_text,
                    const std::filesystem::path& image_root) {
    ojson parts = ojson::array();
    for (const auto& [kind, payload] : frames) {
        if (kind == PayloadKind::image) {
            parts.push_back({{"type", "image_url"},
                             {"image_url", {{"url", image_payload_url(payload, image_root)}}}});
        } else {
            parts.push_back({{"type", "text"}, {"text", payload}});
        }
    }
    if (!trailing_text.empty())
        parts.push_back({{"type", "text"}, {"text", trailing_text}});
    return parts;
}

}  // namespace

void RemoteConfig::apply_env_defaults() {
    if (base_url.empty()) base_url = env_or_empty("PIRA_API_BASE");
    if (api_key.empty()) api_key = env_or_empty("PIRA_API_KEY");
}

Transport make_httplib_transport(const RemoteConfig& config) {
    const std::string base = config.base_url;
    const int timeout = config.timeout_seconds;
    return [base, timeout](const std::string& path, const HttpHeaders& headers,
                           const std::string& body) {
        httplib::Client client(base);
        client.set_connection_timeout(timeout, 0);
        client.set_read_timeout(timeout, 0);
        httplib::Headers hdrs;
        for (const auto& [k, v] : headers) hdrs.emplace(k, v);
        auto result = client.Post(path, hdrs, body, "application/json");
        HttpResponse response;
        if (!result) {
            response.transport_error = true;
            response.error = httplib::to_string(result.error());
            return response;
        }
        response.status = result->status;
        response.body = result->body;
        return response;
    };
}

ojson build_chat_request(const PromptBundle& bundle, const RemoteConfig& config,
                         const std::filesystem::path& image_root) {
    ojson body;
    body["model"] = config.model;
    body["temperature"] = config.temperature;
    ojson messages = ojson::array();
    messages.push_back({{"role", "system"}, {"content", bundle.system_text}});

    // Naive mode: replay prior turns so the transcript is the state.
    for (const auto& turn : bundle.transcript) {
        messages.push_back(
            {{"role", "user"}, {"content", content_parts(turn.frames, "", image_root)}});
        messages.push_back({{"role", "assistant"}, {"content", turn.reply}});
    }

    std::vector<std::pair<PayloadKind, std::string>> frames;
    std::string history_text;
    for (std::size_t i = 0; i < bundle.window.size(); ++i) {
        const auto& entry = bundle.window[i];
        if (bundle.query_kind == QueryKind::transition && !entry.decision_summary.empty() &&
            i + 1 < bundle.window.size()) {
            // Prior frames carry the decision taken at that step.
            frames.emplace_back(entry.kind, entry.payload);
            frames.emplace_back(PayloadKind::text,
                                "(decision at that screen: " + entry.decision_summary + ")");
        } else {
            frames.emplace_back(entry.kind, entry.payload);
        }
    }

    std::string instruction;
    switch (bundle.query_kind) {
        case QueryKind::transition:
            instruction = "Current memory state:\n" + bundle.memory_rendering +
                          "\n\nDecide the state transition for the newest screen. "
                          "Reply with one JSON object.";
            break;
        case QueryKind::observe:
            instruction = "Remember the context and observe user behavior. "
                          "Do not output any predictions yet; reply with a short "
                          "acknowledgement.";
            break;
        case QueryKind::predict_final:
            instruction = "This is the final turn. Based on everything observed, output "
                          "the set of actionable intents the user will likely want next, "
                          "as a JSON array of strings. Output [] if there is none.";
            break;
    }
    messages.push_back({{"role", "user"},
                        {"content", content_parts(frames, instruction, image_root)}});
    body["messages"] = std::move(messages);
    return body;
}

struct RemoteBackend::InFlightGate {
    std::mutex mutex;
    std::condition_variable cv;
    int available = 0;

    explicit InFlightGate(int limit) : available(limit) {}

    void acquire() {
        std::unique_lock lock(mutex);
        cv.wait(lock, [this] { return available > 0; });
        --available;
    }
    void release() {
        {
            std::lock_guard lock(mutex);
            ++available;
        }
        cv.notify_one();
    }
};

RemoteBackend::RemoteBackend(RemoteConfig config, std::filesystem::path image_root)
    : RemoteBackend(std::move(config), Transport{}, std::move(image_root)) {}

RemoteBackend::RemoteBackend(RemoteConfig config, Transport transport,
                             std::filesystem::path image_root)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      image_root_(std::move(image_root)) {
    config_.apply_env_defaults();
    if (!transport_) {
        if (config_.base_url.empty())
            throw BackendError("remote backend requires a base URL (set PIRA_API_BASE)");
        transport_ = make_httplib_transport(config_);
    }
    gate_ = std::make_shared<InFlightGate>(std::max(1, config_.max_in_flight));
}

RawCompletion RemoteBackend::complete(const PromptBundle& bundle) {
    const std::string body = build_chat_request(bundle, config_, image_root_).dump();
    HttpHeaders headers{{"Authorization", "Bearer " + config_.api_key},
                        {"Content-Type", "application/json"}};

    gate_->acquire();
    struct Release {
        InFlightGate* gate;
        ~Release() { gate->release(); }
    } release{gate_.get()};

    const auto start = std::chrono::steady_clock::now();
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            const auto backoff = std::chrono::milliseconds(250) * (1 << std::min(attempt - 1, 4));
            std::this_thread::sleep_for(backoff);
        }
        const HttpResponse response = transport_(config_.chat_path, headers, body);

        if (response.transport_error) {
            last_error = "transport failure: " + response.error;
            continue;
        }
        if (response.status == 401 || response.status == 403)
            throw BackendError("authentication failed (HTTP " +
                                   std::to_string(response.status) + ")",
                               /*auth_failure=*/true);
        if (response.status == 429 || response.status >= 500) {
            last_error = "HTTP " + std::to_string(response.status);
            continue;
        }
        if (response.status != 200) {
            throw BackendError("unexpected HTTP status " + std::to_string(response.status) +
                               ": " + response.body);
        }

        ojson parsed = ojson::parse(response.body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty())
            throw BackendError("malformed completion response body");
        RawCompletion raw;
        raw.text = parsed["choices"][0]["message"]["content"].get<std::string>();
        if (parsed.contains("usage")) {
            const auto& usage = parsed["usage"];
            if (usage.contains("prompt_tokens"))
                raw.prompt_tokens = usage["prompt_tokens"].get<int>();
            if (usage.contains("completion_tokens"))
                raw.completion_tokens = usage["completion_tokens"].get<int>();
        }
        raw.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start);
        raw.retries = attempt;
        return raw;
    }
    throw BackendError("request failed after " + std::to_string(config_.max_retries) +
                       " retries: " + last_error);
}

}  // namespace pira::backend
