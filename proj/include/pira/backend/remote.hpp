#pragma once

#include <filesystem>
#include <functional>

#include "json.hpp"
#include "pira/backend/backend.hpp"

namespace pira::backend {

struct RemoteConfig {
    std::string base_url;    // default: PIRA_API_BASE
    std::string api_key;     // default: PIRA_API_KEY
    std::string model = "default";
    std::string chat_path = "/v1/chat/completions";
    double temperature = 0.0;
    int timeout_seconds = 60;
    int max_retries = 3;
    int max_in_flight = 4;

    // Fills base_url / api_key from the environment when unset.
    void apply_env_defaults();
};

struct HttpResponse {
    int status = 0;
    std::string body;
    bool transport_error = false;
    std::string error;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

// POSTs a JSON body; swappable so tests can run the full retry policy
// without a server.
using Transport =
    std::function<HttpResponse(const std::string& path, const HttpHeaders& headers,
                               const std::string& body)>;

Transport make_httplib_transport(const RemoteConfig& config);

// Chat-completion request body for a bundle: system message, then the window
// (and, in naive mode, the prior transcript turns) as user/assistant
// messages. Image payloads become image_url parts (base64 data URLs resolved
// against image_root); text payloads are inlined.
nlohmann::ordered_json build_chat_request(const PromptBundle& bundle,
                                          const RemoteConfig& config,
                                          const std::filesystem::path& image_root = {});

// Remote chat-completion client. Retries transport failures, 429 and 5xx
// with exponential backoff up to max_retries; authentication failures
// (401/403) are surfaced immediately and never retried. Concurrent calls are
// capped at max_in_flight.
class RemoteBackend : public Backend {
public:
    explicit RemoteBackend(RemoteConfig config, std::filesystem::path image_root = {});
    RemoteBackend(RemoteConfig config, Transport transport,
                  std::filesystem::path image_root = {});

    RawCompletion complete(const PromptBundle& bundle) override;
    std::string name() const override { return "remote:" + config_.model; }

private:
    RemoteConfig config_;
    Transport transport_;
    std::filesystem::path image_root_;

    struct InFlightGate;
    std::shared_ptr<InFlightGate> gate_;
};

}  // namespace pira::backend
