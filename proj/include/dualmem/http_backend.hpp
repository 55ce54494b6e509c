/*
 * Live HTTP backends speaking the widely used chat-completion and
 * embedding wire shapes, plus a record/replay fixture layer so integration
 * tests run without credentials or network access.
 */
#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "dualmem/backends.hpp"
#include "dualmem/persistence.hpp"
#include "dualmem/util.hpp"

namespace dualmem {

struct HttpResponse {
    int status = 0;
    std::string body;
    bool transport_ok = false;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post_json(const std::string& path, const std::string& body) = 0;
};

class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(const ChatBackendSpec& spec) : spec_(spec) {}

    HttpResponse post_json(const std::string& path, const std::string& body) override {
        httplib::Client client(spec_.endpoint);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(spec_.timeout));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(spec_.timeout));
        httplib::Headers headers;
        if (const char* key = std::getenv(spec_.api_key_env.c_str()))
            headers.emplace("Authorization", std::string("Bearer ") + key);
        auto res = client.Post(path, headers, body, "application/json");
        HttpResponse out;
        if (res) {
            out.transport_ok = true;
            out.status = res->status;
            out.body = res->body;
        }
        return out;
    }

private:
    ChatBackendSpec spec_;
};

enum class FixtureMode { live, record, replay };

// Fixtures are stored one file per request under <dir>/<request-hash>.json.
class FixtureTransport final : public HttpTransport {
public:
    FixtureTransport(std::filesystem::path dir, FixtureMode mode,
                     std::shared_ptr<HttpTransport> inner = nullptr)
        : dir_(std::move(dir)), mode_(mode), inner_(std::move(inner)) {
        if (mode_ != FixtureMode::replay && !inner_)
            throw ConfigError("FixtureTransport: live/record modes need an inner transport");
        std::filesystem::create_directories(dir_);
    }

    HttpResponse post_json(const std::string& path, const std::string& body) override {
        std::string key = to_hex(fnv1a64(path + "\n" + body));
        std::filesystem::path file = dir_ / (key + ".json");
        if (mode_ == FixtureMode::replay) {
            if (!std::filesystem::exists(file))
                throw BackendError("FixtureTransport: no fixture for request hash " + key);
            nlohmann::json j = nlohmann::json::parse(read_file(file));
            HttpResponse out;
            out.transport_ok = true;
            out.status = j.at("status").get<int>();
            out.body = j.at("body").get<std::string>();
            return out;
        }
        HttpResponse out = inner_->post_json(path, body);
        if (mode_ == FixtureMode::record && out.transport_ok) {
            nlohmann::ordered_json j{
                {"path", path}, {"request", body}, {"status", out.status}, {"body", out.body}};
            write_atomic(file, j.dump(2) + "\n");
        }
        return out;
    }

private:
    std::filesystem::path dir_;
    FixtureMode mode_;
    std::shared_ptr<HttpTransport> inner_;
};

namespace detail {

// 2 retries with exponential backoff on transport and server errors.
inline HttpResponse post_with_retry(HttpTransport& transport, const std::string& path,
                                    const std::string& body, unsigned retries = 2,
                                    std::chrono::milliseconds base_backoff = std::chrono::milliseconds(100)) {
    HttpResponse res;
    for (unsigned attempt = 0; attempt <= retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(base_backoff * (1u << (attempt - 1)));
        res = transport.post_json(path, body);
        if (res.transport_ok && res.status < 500) return res;
    }
    return res;
}

}  // namespace detail

class HttpChatBackend final : public ChatBackend {
public:
    HttpChatBackend(ChatBackendSpec spec, std::shared_ptr<HttpTransport> transport,
                    TokenCounter counter = {})
        : spec_(std::move(spec)), transport_(std::move(transport)), counter_(counter) {
        spec_.kind = BackendKind::http_openai_compatible;
        spec_.validate();
    }

    ChatResult complete(const std::string& prompt) override {
        ChatResult result;
        result.record.input_tokens = counter_.count(prompt);
        if (result.record.input_tokens > spec_.context_limit) {
            result.record.outcome = CallRecord::Outcome::overflow;
            return result;
        }
        nlohmann::ordered_json request{
            {"model", spec_.model},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
            {"temperature", spec_.temperature},
            {"max_tokens", spec_.max_output_tokens},
        };
        auto started = std::chrono::steady_clock::now();
        HttpResponse res = detail::post_with_retry(*transport_, "/v1/chat/completions", request.dump());
        result.record.wall_latency = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - started);
        if (!res.transport_ok || res.status != 200) {
            result.record.outcome = CallRecord::Outcome::error;
            return result;
        }
        try {
            nlohmann::json j = nlohmann::json::parse(res.body);
            result.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
            if (j.contains("usage")) {
                result.record.input_tokens = j["usage"].value("prompt_tokens", result.record.input_tokens);
                result.record.output_tokens =
                    j["usage"].value("completion_tokens", counter_.count(result.text));
            } else {
                result.record.output_tokens = counter_.count(result.text);
            }
        } catch (const nlohmann::json::exception&) {
            result.record.outcome = CallRecord::Outcome::error;
            result.text.clear();
        }
        return result;
    }

    const ChatBackendSpec& spec() const override { return spec_; }

private:
    ChatBackendSpec spec_;
    std::shared_ptr<HttpTransport> transport_;
    TokenCounter counter_;
};

class HttpEmbeddingBackend final : public EmbeddingBackend {
public:
    HttpEmbeddingBackend(ChatBackendSpec spec, std::shared_ptr<HttpTransport> transport,
                         std::size_t dimension)
        : spec_(std::move(spec)), transport_(std::move(transport)), dim_(dimension) {
        spec_.validate();
    }

    std::vector<double> embed(std::string_view text) const override {
        nlohmann::ordered_json request{{"model", spec_.model}, {"input", std::string(text)}};
        HttpResponse res = detail::post_with_retry(*transport_, "/v1/embeddings", request.dump());
        if (!res.transport_ok || res.status != 200)
            throw BackendError("HttpEmbeddingBackend: request failed with status " +
                               std::to_string(res.status));
        std::vector<double> v;
        try {
            nlohmann::json j = nlohmann::json::parse(res.body);
            v = j.at("data").at(0).at("embedding").get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(std::string("HttpEmbeddingBackend: malformed response: ") + e.what());
        }
        if (v.size() != dim_)
            throw BackendError("HttpEmbeddingBackend: expected dimension " + std::to_string(dim_) +
                               ", got " + std::to_string(v.size()));
        double norm2 = 0.0;
        for (double x : v) norm2 += x * x;
        if (norm2 > 0.0) {
            double inv = 1.0 / std::sqrt(norm2);
            for (double& x : v) x *= inv;
        }
        return v;
    }

    std::size_t dimension() const override { return dim_; }

private:
    ChatBackendSpec spec_;
    std::shared_ptr<HttpTransport> transport_;
    std::size_t dim_;
};

class HttpJudgeBackend final : public JudgeBackend {
public:
    HttpJudgeBackend(ChatBackendSpec spec, std::shared_ptr<HttpTransport> transport)
        : backend_(std::move(spec), std::move(transport)) {}

    std::string evaluate(const std::string& question, const std::string& ground_truth,
                         const std::string& answer) override {
        std::string prompt =
            "Rate the answer on a 0-10 scale for factual correctness, completeness and coherence. "
            "Reply with 'Score: N'.\nQuestion: " + question + "\nGround truth: " + ground_truth +
            "\nAnswer: " + answer;
        ChatResult res = backend_.complete(prompt);
        if (res.record.outcome != CallRecord::Outcome::ok)
            throw BackendError("HttpJudgeBackend: judge call failed");
        return res.text;
    }

private:
    HttpChatBackend backend_;
};

}  // namespace dualmem
