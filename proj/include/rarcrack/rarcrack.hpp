/*
 * Copyright 2026 The rarcrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "aes128.hpp"
#include "archive.hpp"
#include "bench.hpp"
#include "bounded_queue.hpp"
#include "bytes.hpp"
#include "candidates.hpp"
#include "crc32.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "kdf.hpp"
#include "sha1.hpp"
#include "text.hpp"
#include "verifier.hpp"
