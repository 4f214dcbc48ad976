#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace supernova {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  // Decoding parameters passed through verbatim (temperature etc.).
  std::map<std::string, double> params;

  ChatRequest() = default;
  ChatRequest(std::string model_id, std::string user_prompt) : model(std::move(model_id)) {
    messages.push_back({"user", std::move(user_prompt)});
  }
};

struct ChatResponse {
  std::string content;
  std::string reasoning;  // empty when the endpoint exposes none
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  // One vector per input, order preserved, uniform dimension.
  virtual std::vector<std::vector<float>> embed(const std::string& model,
                                                const std::vector<std::string>& inputs) = 0;
};

using ChatClientPtr = std::shared_ptr<ChatClient>;
using EmbeddingClientPtr = std::shared_ptr<EmbeddingClient>;

}  // namespace supernova
