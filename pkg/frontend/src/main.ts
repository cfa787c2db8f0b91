import { ApiClient } from './api';
import { Concordancer } from './app';

const root = document.getElementById('app');
if (root) {
    const app = new Concordancer(root, new ApiClient(''));
    void app.start();
}
