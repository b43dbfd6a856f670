/*
 * Copyright (C) 2026 The Umbracast Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "umbracast/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace umbracast {

int worker_count() {
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("UMBRACAST_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap > 0) {
                n = std::min(n, cap);
            }
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    return n;
}

} // namespace umbracast
