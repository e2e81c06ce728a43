// SPDX-License-Identifier: Apache-2.0
//
// Chat-completion provider abstraction. Production use goes through an
// HTTP endpoint; tests and offline runs use a scripted mock that replays
// canned replies.

#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace subckt {

struct Message {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct ProviderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string complete(const std::vector<Message>& conversation) = 0;
  virtual std::string name() const = 0;
  /// Number of completed requests so far.
  std::size_t calls() const { return calls_; }

 protected:
  std::size_t calls_ = 0;
};

/// Replays a fixed list of replies in order. With `repeat_last`, an
/// exhausted queue keeps returning the final reply; otherwise exhaustion is
/// a ProviderError.
class MockProvider : public ChatProvider {
 public:
  explicit MockProvider(std::vector<std::string> replies,
                        bool repeat_last = false);

  std::string complete(const std::vector<Message>& conversation) override;
  std::string name() const override { return "mock"; }

  /// Full request history, for assertions on conversation growth.
  const std::vector<std::vector<Message>>& requests() const {
    return requests_;
  }

 private:
  std::vector<std::string> replies_;
  bool repeat_last_;
  std::size_t next_ = 0;
  std::vector<std::vector<Message>> requests_;
};

struct EndpointDescriptor {
  std::string url;             // e.g. https://host/v1/chat/completions
  std::string model;
  std::string credential_env;  // environment variable holding the API key
};

/// OpenAI-style chat-completion client over the endpoint descriptor.
class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(EndpointDescriptor endpoint);

  std::string complete(const std::vector<Message>& conversation) override;
  std::string name() const override { return "http:" + endpoint_.model; }

 private:
  EndpointDescriptor endpoint_;
};

}  // namespace subckt
