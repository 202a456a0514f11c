#pragma once

#define SOLSURF_VERSION "0.1.0"
