#pragma once

#define MERANK_VERSION_MAJOR 0
#define MERANK_VERSION_MINOR 1
#define MERANK_VERSION_PATCH 0
#define MERANK_VERSION_STRING "0.1.0"
