#include <filesystem>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "simukit/error.hpp"
#include "simukit/orchestrator.hpp"

namespace simukit::orchestrator {

using nlohmann::json;

namespace {

struct SplitUrl {
    std::string base;  // scheme://host:port
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error("TransportError", "endpoint URL '" + url + "' has no scheme");
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string base64(const std::string& bytes) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 2 < bytes.size()) {
        unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                     (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                     static_cast<unsigned char>(bytes[i + 2]);
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out.push_back(alphabet[(v >> 6) & 63]);
        out.push_back(alphabet[v & 63]);
        i += 3;
    }
    if (i + 1 == bytes.size()) {
        unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out += "==";
    } else if (i + 2 == bytes.size()) {
        unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                     (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out.push_back(alphabet[(v >> 6) & 63]);
        out += "=";
    }
    return out;
}

json image_part(const std::string& image) {
    std::string url = image;
    if (std::filesystem::exists(image)) {
        std::ifstream in(image, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        url = "data:image/png;base64," + base64(buf.str());
    }
    return json{{"type", "image_url"}, {"image_url", {{"url", url}}}};
}

}  // namespace

TransportResponse HttpTransport::send(const TransportRequest& request) {
    auto [base, path] = split_url(endpoint_url_);
    httplib::Client client(base);
    client.set_read_timeout(600, 0);

    json body;
    body["model"] = request.model_id;
    if (request.image) {
        body["messages"] = json::array(
            {{{"role", "user"},
              {"content", json::array({json{{"type", "text"}, {"text", request.prompt}},
                                       image_part(*request.image)})}}});
    } else {
        body["messages"] =
            json::array({{{"role", "user"}, {"content", request.prompt}}});
    }
    body["metadata"] = {{"agent_role", to_string(request.role)}};

    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) {
        throw Error("TransportError", "POST " + endpoint_url_ + " failed: " +
                                          httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw Error("TransportError", "endpoint returned HTTP " +
                                          std::to_string(res->status) + ": " + res->body);
    }

    json parsed;
    try {
        parsed = json::parse(res->body);
    } catch (const std::exception& e) {
        throw Error("TransportError", std::string("bad endpoint JSON: ") + e.what());
    }

    TransportResponse out;
    if (parsed.contains("choices") && !parsed["choices"].empty()) {
        out.text = parsed["choices"][0]["message"]["content"].get<std::string>();
    } else if (parsed.contains("text")) {
        out.text = parsed["text"].get<std::string>();
    } else {
        throw Error("TransportError", "endpoint response carries no text");
    }
    if (parsed.contains("usage")) {
        const auto& usage = parsed["usage"];
        if (usage.contains("cost")) out.token_cost = usage["cost"].get<double>();
    }
    return out;
}

}  // namespace simukit::orchestrator
