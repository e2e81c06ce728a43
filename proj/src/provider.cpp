// SPDX-License-Identifier: Apache-2.0

#include "subckt/provider.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

namespace subckt {

MockProvider::MockProvider(std::vector<std::string> replies, bool repeat_last)
    : replies_(std::move(replies)), repeat_last_(repeat_last) {}

std::string MockProvider::complete(const std::vector<Message>& conversation) {
  requests_.push_back(conversation);
  ++calls_;
  if (next_ < replies_.size()) return replies_[next_++];
  if (repeat_last_ && !replies_.empty()) return replies_.back();
  throw ProviderError("mock provider exhausted after " +
                      std::to_string(replies_.size()) + " replies");
}

HttpChatProvider::HttpChatProvider(EndpointDescriptor endpoint)
    : endpoint_(std::move(endpoint)) {}

std::string HttpChatProvider::complete(
    const std::vector<Message>& conversation) {
  ++calls_;

  // Split the URL into host root and path.
  auto scheme_end = endpoint_.url.find("://");
  if (scheme_end == std::string::npos)
    throw ProviderError("endpoint url needs a scheme: " + endpoint_.url);
  auto path_start = endpoint_.url.find('/', scheme_end + 3);
  std::string root = path_start == std::string::npos
                         ? endpoint_.url
                         : endpoint_.url.substr(0, path_start);
  std::string path = path_start == std::string::npos
                         ? "/"
                         : endpoint_.url.substr(path_start);

  nlohmann::json payload;
  payload["model"] = endpoint_.model;
  payload["messages"] = nlohmann::json::array();
  for (const auto& msg : conversation)
    payload["messages"].push_back({{"role", msg.role}, {"content", msg.content}});

  httplib::Headers headers;
  if (!endpoint_.credential_env.empty()) {
    const char* key = std::getenv(endpoint_.credential_env.c_str());
    if (key == nullptr)
      throw ProviderError("credential variable " + endpoint_.credential_env +
                          " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  httplib::Client client(root);
  client.set_read_timeout(120, 0);
  auto res = client.Post(path, headers, payload.dump(), "application/json");
  if (!res)
    throw ProviderError("transport failure contacting " + endpoint_.url);
  if (res->status != 200)
    throw ProviderError("provider returned status " +
                        std::to_string(res->status) + ": " + res->body);
  try {
    auto doc = nlohmann::json::parse(res->body);
    return doc.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("unexpected provider payload: ") +
                        e.what());
  }
}

}  // namespace subckt
