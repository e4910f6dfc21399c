#include <stdio.h>
#include <string.h>
#include "rfct.h"

#define W 64
#define H 48

int main(void) {
    static uint8_t px[W * H * 3];
    for (int y = 0; y < H; y++)
        for (int x = 0; x < W; x++)
            for (int c = 0; c < 3; c++)
                px[(y * W + x) * 3 + c] = (x >= 24 && x < 40 && y >= 16 && y < 32) ? (uint8_t)(40 * c + 8 * ((x / 4 + y / 4) % 4)) : 100;

    RfctConfig *cfg = rfct_config_new();
    if (rfct_config_set(cfg, "map.kind", "rquadratic") != RFCT_STATUS_OK) return 1;
    if (rfct_config_set(cfg, "lambda", "-3") != RFCT_STATUS_CONFIG) return 2;
    if (rfct_last_error_message() == NULL) return 3;

    RfctTracker *t = NULL;
    RfctBox init = {24.0, 16.0, 16.0, 16.0};
    if (rfct_tracker_new(cfg, px, W, H, 3, init, &t) != RFCT_STATUS_OK) {
        fprintf(stderr, "%s\n", rfct_last_error_message());
        return 4;
    }
    RfctBox b;
    for (int i = 0; i < 3; i++)
        if (rfct_tracker_step(t, px, W, H, 3, &b) != RFCT_STATUS_OK) return 5;
    uint64_t k = 0;
    rfct_tracker_state(t, NULL, NULL, &k);
    if (k != 4) return 6;
    rfct_tracker_free(t);

    RfctMetrics m;
    RfctBox gt[1] = {init};
    if (rfct_evaluate(gt, gt, 1, &m) != RFCT_STATUS_OK || m.auc != 1.0) return 7;

    char *text = rfct_config_to_text(cfg);
    int ok = strstr(text, "map.kind = rquadratic") != NULL;
    rfct_string_free(text);
    rfct_config_free(cfg);
    printf("box %.2f %.2f %.2f %.2f version %s\n", b.x, b.y, b.w, b.h, rfct_version());
    return ok ? 0 : 8;
}
