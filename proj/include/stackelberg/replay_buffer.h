// Copyright 2026 The Stackelberg Assembly Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STACKELBERG_REPLAY_BUFFER_H_
#define STACKELBERG_REPLAY_BUFFER_H_

#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

namespace stackelberg {

// Fixed-capacity FIFO. Pushing into a full buffer evicts the oldest item;
// sampling is uniform with replacement over the current contents.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("replay capacity must be positive");
    storage_.reserve(std::min<size_t>(capacity_, 1 << 16));
  }

  size_t capacity() const { return capacity_; }
  size_t size() const { return storage_.size(); }
  bool empty() const { return storage_.empty(); }

  void push(T item) {
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(item));
    } else {
      storage_[head_] = std::move(item);
      head_ = (head_ + 1) % capacity_;
    }
  }

  // i = 0 is the oldest stored item.
  const T& at(size_t i) const {
    if (i >= storage_.size()) throw std::out_of_range("replay index");
    return storage_[(head_ + i) % storage_.size()];
  }

  template <typename Urng>
  std::vector<const T*> sample(size_t count, Urng& rng) const {
    if (storage_.empty()) throw std::logic_error("cannot sample an empty replay buffer");
    std::uniform_int_distribution<size_t> pick(0, storage_.size() - 1);
    std::vector<const T*> batch;
    batch.reserve(count);
    for (size_t i = 0; i < count; ++i) batch.push_back(&storage_[pick(rng)]);
    return batch;
  }

 private:
  size_t capacity_;
  size_t head_ = 0;  // oldest element once the buffer has wrapped
  std::vector<T> storage_;
};

}  // namespace stackelberg

#endif  // STACKELBERG_REPLAY_BUFFER_H_
