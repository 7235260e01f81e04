#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

// Minimal streaming JSON writer. Doubles are emitted with %.17g so values
// round-trip bit-exactly and output bytes are stable across runs.

namespace dtr::jsonio {

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  Writer& begin_object() { return open('{'); }
  Writer& end_object() { return close('}'); }
  Writer& begin_array() { return open('['); }
  Writer& end_array() { return close(']'); }

  Writer& key(std::string_view k) {
    separate();
    write_string(k);
    out_ << ": ";
    pending_key_ = true;
    return *this;
  }

  Writer& value(double v) {
    separate();
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out_ << buf;
    return *this;
  }
  Writer& value(std::int64_t v) {
    separate();
    out_ << v;
    return *this;
  }
  Writer& value(std::uint64_t v) {
    separate();
    out_ << v;
    return *this;
  }
  Writer& value(int v) { return value(static_cast<std::int64_t>(v)); }
  Writer& value(bool v) {
    separate();
    out_ << (v ? "true" : "false");
    return *this;
  }
  Writer& value(std::string_view v) {
    separate();
    write_string(v);
    return *this;
  }
  Writer& value(const char* v) { return value(std::string_view(v)); }

  Writer& kv(std::string_view k, double v) { return key(k).value(v); }
  Writer& kv(std::string_view k, std::int64_t v) { return key(k).value(v); }
  Writer& kv(std::string_view k, std::uint64_t v) { return key(k).value(v); }
  Writer& kv(std::string_view k, int v) { return key(k).value(v); }
  Writer& kv(std::string_view k, bool v) { return key(k).value(v); }
  Writer& kv(std::string_view k, std::string_view v) { return key(k).value(v); }

  void finish() { out_ << '\n'; }

 private:
  Writer& open(char c) {
    separate();
    out_ << c;
    stack_.push_back({c == '[', 0});
    return *this;
  }

  Writer& close(char c) {
    if (!stack_.empty() && stack_.back().count > 0) {
      newline(static_cast<int>(stack_.size()) - 1);
    }
    stack_.pop_back();
    out_ << c;
    return *this;
  }

  // comma/newline bookkeeping before each element
  void separate() {
    if (pending_key_) {
      pending_key_ = false;
      return;
    }
    if (stack_.empty()) return;
    if (stack_.back().count > 0) out_ << ',';
    newline(static_cast<int>(stack_.size()));
    ++stack_.back().count;
  }

  void newline(int depth) {
    out_ << '\n';
    for (int i = 0; i < depth; ++i) out_ << "  ";
  }

  void write_string(std::string_view s) {
    out_ << '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ << "\\\""; break;
        case '\\': out_ << "\\\\"; break;
        case '\n': out_ << "\\n"; break;
        case '\t': out_ << "\\t"; break;
        case '\r': out_ << "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out_ << buf;
          } else {
            out_ << c;
          }
      }
    }
    out_ << '"';
  }

  struct Frame {
    bool is_array = false;
    int count = 0;
  };
  std::ostream& out_;
  std::vector<Frame> stack_;
  bool pending_key_ = false;
};

}  // namespace dtr::jsonio
