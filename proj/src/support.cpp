// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <atomic>
#include <fstream>
#include <thread>
#include <vector>

#include "common.hpp"
#include "sha256.hpp"

namespace langpaint {

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(ErrCode::Io, "cannot open '" + path.string() + "'");
  Sha256 h;
  char buf[1 << 16];
  while (f) {
    f.read(buf, sizeof(buf));
    h.update(buf, size_t(f.gcount()));
  }
  if (f.bad()) raise(ErrCode::Io, "read failed for '" + path.string() + "'");
  return h.hex_digest();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(ErrCode::Io, "cannot open '" + path.string() + "'");
  std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) raise(ErrCode::Io, "read failed for '" + path.string() + "'");
  return content;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) raise(ErrCode::Io, "cannot open '" + tmp.string() + "' for writing");
    f.write(content.data(), std::streamsize(content.size()));
    if (!f) raise(ErrCode::Io, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) raise(ErrCode::Io, "cannot rename '" + tmp.string() + "': " + ec.message());
}

void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn) {
  if (n == 0) return;
  const size_t workers = std::min<size_t>(n, size_t(std::max(threads, 1)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace langpaint
