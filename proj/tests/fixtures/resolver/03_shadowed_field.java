package fixtures.shadow;

import org.json.JSONObject;
import com.google.gson.JsonObject;

public class Shadow {
    private JSONObject data = new JSONObject(); //@use org.json.JSONObject.<init>/0

    public int size() {
        return data.length(); //@use org.json.JSONObject.length/0
    }

    public boolean has(String key) {
        JsonObject data = new JsonObject(); //@use com.google.gson.JsonObject.<init>/0
        return data.has(key); //@use com.google.gson.JsonObject.has/1
    }

    public boolean fieldHas(String key) {
        JsonObject data = null;
        return this.data.has(key); //@use org.json.JSONObject.has/1
    }
}
