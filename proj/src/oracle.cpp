#include "wuplab/oracle.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <ostream>

#include "wuplab/aes128.hpp"

namespace wuplab::oracle {

namespace {

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

void OracleTranscript::append(TranscriptEntry entry) {
  std::lock_guard lock(mutex_);
  entries_.push_back(std::move(entry));
}

std::vector<TranscriptEntry> OracleTranscript::snapshot() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

std::size_t OracleTranscript::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t OracleTranscript::accepted_count() const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.accepted;
  return n;
}

void OracleTranscript::clear() {
  std::lock_guard lock(mutex_);
  entries_.clear();
}

void OracleTranscript::write_jsonl(std::ostream& out) const {
  std::lock_guard lock(mutex_);
  for (const auto& e : entries_) {
    out << "{\"ts\":" << e.timestamp_ms << ",\"client\":\"" << e.client_id
        << "\",\"accepted\":" << (e.accepted ? "true" : "false") << ",\"blob_sha256\":\""
        << to_hex(ByteView(e.rsa_blob_digest.data(), e.rsa_blob_digest.size())) << "\"}\n";
  }
}

wup::WupMessage Oracle::response_message() {
  wup::WupMessage msg;
  msg.kind = wup::MsgKind::response;
  msg.add_field("status", std::string_view("ok"));
  return msg;
}

std::optional<Bytes> Oracle::handle_session(const wup::EncryptedSession& sess,
                                            std::string_view client_id) {
  if (cfg_.artificial_latency_ms > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.artificial_latency_ms));
  }
  bool accepted = false;
  std::optional<Bytes> reply;
  try {
    auto [key, request] = cfg_.wrap == KeyWrap::textbook
                              ? wup::open_session(cfg_.key_pair, sess, cfg_.key_bits)
                              : wup::open_session_oaep(cfg_.key_pair, sess);
    (void)request;
    accepted = true;
    if (cfg_.respond_on_valid) {
      reply = aes::ecb_encrypt(ByteView(key.bytes.data(), key.bytes.size()),
                               wup::serialize(response_message()));
    }
  } catch (const wup::InvalidRequest&) {
    // silence is the reject signal
  }
  if (cfg_.log_queries) {
    transcript_.append({now_ms(), std::string(client_id), accepted, sha256(view(sess.rsa_blob))});
  }
  return reply;
}

std::optional<Bytes> Oracle::handle_body(ByteView body, std::string_view client_id) {
  wup::EncryptedSession sess;
  try {
    sess = wup::decode_session(body, cfg_.key_pair.pub.modulus_bytes());
  } catch (const wup::InvalidRequest&) {
    if (cfg_.log_queries) transcript_.append({now_ms(), std::string(client_id), false, sha256(body)});
    return std::nullopt;
  }
  return handle_session(sess, client_id);
}

// ---------------------------------------------------------------------------
// TCP transport

namespace {

struct FdStream final : wup::ByteStream {
  int fd;
  int timeout_ms;
  explicit FdStream(int f, int timeout = -1) : fd(f), timeout_ms(timeout) {}

  std::size_t read_some(std::span<std::uint8_t> out) override {
    if (timeout_ms >= 0) {
      pollfd pfd{fd, POLLIN, 0};
      int rc = ::poll(&pfd, 1, timeout_ms);
      if (rc == 0) throw TransportError("tcp: read timeout");
      if (rc < 0) throw TransportError("tcp: poll failed");
    }
    ssize_t n = ::recv(fd, out.data(), out.size(), 0);
    if (n < 0) throw TransportError("tcp: recv failed");
    return static_cast<std::size_t>(n);
  }

  void write(ByteView data) override {
    std::size_t sent = 0;
    while (sent < data.size()) {
      ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) throw TransportError("tcp: send failed");
      sent += static_cast<std::size_t>(n);
    }
  }
};

struct UniqueFd {
  int fd = -1;
  explicit UniqueFd(int f) : fd(f) {}
  ~UniqueFd() {
    if (fd >= 0) ::close(fd);
  }
  UniqueFd(const UniqueFd&) = delete;
  UniqueFd& operator=(const UniqueFd&) = delete;
};

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw TransportError("tcp: bad address " + host);
  }
  return addr;
}

}  // namespace

TcpOracleServer::TcpOracleServer(Oracle& oracle, const std::string& host, std::uint16_t port)
    : oracle_(oracle), host_(host) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw TransportError("tcp: socket failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = make_addr(host, port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    ::close(listen_fd_);
    throw TransportError("tcp: bind failed on " + host + ":" + std::to_string(port));
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  if (::listen(listen_fd_, 128) < 0) {
    ::close(listen_fd_);
    throw TransportError("tcp: listen failed");
  }
  acceptor_ = std::thread([this] { accept_loop(); });
}

TcpOracleServer::~TcpOracleServer() { stop(); }

void TcpOracleServer::stop() {
  bool expected = false;
  if (!stopping_.compare_exchange_strong(expected, true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable()) acceptor_.join();
  std::lock_guard lock(workers_mutex_);
  for (auto& w : workers_) {
    if (w.joinable()) w.join();
  }
  workers_.clear();
}

void TcpOracleServer::accept_loop() {
  while (!stopping_.load()) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (stopping_.load()) break;
      continue;
    }
    connections_.fetch_add(1);
    std::lock_guard lock(workers_mutex_);
    if (workers_.size() > 256) {
      // reap the oldest batch; they are one-shot handlers and long gone
      for (std::size_t i = 0; i < 128; ++i) {
        if (workers_[i].joinable()) workers_[i].join();
      }
      workers_.erase(workers_.begin(), workers_.begin() + 128);
    }
    workers_.emplace_back([this, fd] {
      UniqueFd guard(fd);
      try {
        FdStream stream(fd, 10000);
        auto body = wup::frame_read(stream);
        if (!body) return;
        sockaddr_in peer{};
        socklen_t len = sizeof(peer);
        std::string client = "tcp";
        if (::getpeername(fd, reinterpret_cast<sockaddr*>(&peer), &len) == 0) {
          char buf[INET_ADDRSTRLEN] = {};
          ::inet_ntop(AF_INET, &peer.sin_addr, buf, sizeof(buf));
          client = std::string(buf) + ":" + std::to_string(ntohs(peer.sin_port));
        }
        auto reply = oracle_.handle_body(view(*body), client);
        if (reply) wup::frame_write(stream, view(*reply));
        // close without reply == reject
      } catch (const std::exception&) {
        // malformed frame or dead peer: drop the connection, keep serving
      }
    });
  }
}

OracleFn in_process_oracle(Oracle& oracle) {
  return [&oracle](const wup::EncryptedSession& sess) { return oracle.handle_session(sess, "attacker"); };
}

OracleFn tcp_oracle(std::string host, std::uint16_t port, int timeout_ms) {
  return [host = std::move(host), port, timeout_ms](
             const wup::EncryptedSession& sess) -> std::optional<Bytes> {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError("tcp: socket failed");
    UniqueFd guard(fd);
    sockaddr_in addr = make_addr(host, port);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
      throw TransportError("tcp: connect failed to " + host + ":" + std::to_string(port));
    }
    FdStream stream(fd, timeout_ms);
    wup::frame_write(stream, view(wup::encode_session(sess)));
    try {
      auto frame = wup::frame_read(stream);
      if (!frame) return std::nullopt;  // clean close: the server rejected
      return *frame;
    } catch (const wup::FramingError&) {
      return std::nullopt;  // connection dropped mid-frame counts as silence
    }
  };
}

}  // namespace wuplab::oracle
